#include <algorithm>
#include <cstdint>
#include <map>
#include <set>

#include "cbr/engine.hpp"

namespace cbr {

namespace {

using Bits = std::vector<std::uint64_t>;

bool any_and(const Bits& a, const Bits& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] & b[i]) return true;
    return false;
}

const Rational& line_coord(const Point& x) {
    if (auto* r = std::get_if<Rational>(&x.v)) return *r;
    return std::get<Rational>(std::get<SumPoint>(x.v).inner->v);
}

// uniform dyadic grid plus the sampled points of F and their midpoints
std::vector<Point> grid_centers(const Presentation& p, const ClosedSetSpec& F, std::uint32_t K) {
    auto [base, scale] = peel(*p.space);
    std::vector<Point> out;
    auto pts = sample_points(F, K + 4);
    if (base->family() == Family::Finite) {
        for (std::size_t i = 0; i < std::get<FiniteSpace>(base->v).labels.size(); ++i) out.push_back(finite_point(i));
        return out;
    }
    Rational step = radius(p, K) / scale / Rational(8);
    if (base->family() == Family::Hedgehog) {
        std::set<u64> spines;
        u64 hi = 0;
        for (const auto& x : pts) {
            const auto& h = std::get<HedgePoint>(x.v);
            if (h.t.sign() > 0) spines.insert(h.spine);
            hi = std::max(hi, h.spine);
        }
        spines.insert(hi + 1);
        out.push_back(hedge_point(0, Rational(0)));
        for (u64 s : spines)
            for (Rational t = step; t <= Rational(1); t += step) out.push_back(hedge_point(s, t));
        for (const auto& x : pts) out.push_back(x);
        return out;
    }
    // line-like: per group, the span of F widened by the top radius
    auto slots = line_slots(*base);
    Rational R0 = radius(p, 0) / scale;
    if (p.transport) R0 = R0 * Rational(4);
    std::map<std::uint32_t, std::pair<Rational, Rational>> span;
    for (const auto& x : pts) {
        std::uint32_t g = 0;
        if (auto* s = std::get_if<SumPoint>(&x.v)) g = s->part;
        const Rational& u = line_coord(x);
        auto it = span.find(g);
        if (it == span.end()) span[g] = {u, u};
        else it->second = {min(it->second.first, u), max(it->second.second, u)};
    }
    const bool am = base->family() == Family::Amalgam;
    for (const auto& sl : slots) {
        auto it = span.find(sl.group);
        if (it == span.end()) continue;
        Rational a = it->second.first - R0 * Rational(2), b = it->second.second + R0 * Rational(2);
        if (!sl.comp.lo_inf) a = max(a, sl.comp.lo);
        if (!sl.comp.hi_inf) b = min(b, sl.comp.hi);
        mpq_class q = a.raw() / step.raw();
        mpz_class fi = q.get_num() / q.get_den();
        for (Rational u = Rational(mpq_class(fi)) * step; u <= b; u += step) {
            if (u < a) continue;
            out.push_back(am ? sum_point(sl.group, line_point(u)) : line_point(u));
        }
    }
    std::vector<Point> sorted = pts;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Point& x, const Point& y) {
        auto* a = std::get_if<Rational>(&x.v);
        auto* b = std::get_if<Rational>(&y.v);
        return a && b && *a < *b;
    });
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        out.push_back(sorted[i]);
        if (sorted[i].v.index() == sorted[i + 1].v.index() && std::holds_alternative<Rational>(sorted[i].v))
            out.push_back(line_point((line_coord(sorted[i]) + line_coord(sorted[i + 1])) / Rational(2)));
    }
    if (!sorted.empty()) out.push_back(sorted.back());
    return out;
}

}  // namespace

RankResult brute_force_rank(const Presentation& p, const ClosedSetSpec& F, std::uint32_t K, BruteOptions opt) {
    RankResult R;
    auto& tr = R.trace;
    tr.engine = "brute";
    check_ambient(F, *p.space);
    if (set_is_empty(F)) {
        tr.stages.push_back({Ordinal(0), {}});
        return R;
    }
    auto fam = peel(*p.space).first->family();
    const bool baire = fam == Family::Baire || fam == Family::UltraTable;

    std::vector<std::string> codes;
    std::vector<BallShape> shapes;
    std::set<BallId> seen;
    auto add = [&](std::string code, BallShape sh) {
        if (codes.size() >= opt.max_codes) throw EngineError("brute force: too many codes");
        codes.push_back(std::move(code));
        shapes.push_back(std::move(sh));
    };

    if (baire) {
        // cylinder prefixes of sampled branches, mapped pointwise into the presentation
        std::vector<Branch> ys;
        if (auto* f = std::get_if<FinitePoints>(&F.v)) {
            for (const auto& x : f->points) ys.push_back(std::get<Branch>(x.v));
        } else {
            const Term& t = std::holds_alternative<BranchFamily>(F.v) ? std::get<BranchFamily>(F.v).term
                                                                       : std::get<SwitchImage>(F.v).image;
            ys = term_branches(t, opt.symbol_bound ? opt.symbol_bound : 20);
        }
        // Baire dense points are the words with a fixed tail; table points are all dense
        const u64 tail = p.dense.rule == DenseRule::EventuallyOne ? 1 : 0;
        std::set<std::vector<u64>> prefixes;
        for (const auto& y : ys) {
            Branch x = p.transport ? p.transport->apply(y) : y;
            for (std::uint32_t L = 0; L <= K; ++L) {
                auto w = x.prefix(L);
                if (!prefixes.count(w)) {
                    Branch c = y;
                    if (fam == Family::Baire) {
                        c = Branch::make(w, tail);
                        if (p.transport) c = p.transport->invert(c);
                    }
                    // long words overflow the numeric index; the centre is dense all the same
                    Point cp = branch_point(c);
                    if (!contains(*p.space, cp)) continue;
                    prefixes.insert(w);
                    add(c.str() + "@" + std::to_string(L), ball_shape(p, cp, L));
                }
            }
        }
    } else {
        auto centers = grid_centers(p, F, K);
        std::vector<Slot> slots;
        if (fam == Family::Interval || fam == Family::Line || fam == Family::Amalgam) slots = line_slots(*p.space);
        auto* fp = std::get_if<FinitePoints>(&F.v);
        for (const auto& c : centers) {
            auto idx = dense_index(p, c);
            if (!idx) continue;
            for (std::uint32_t L = 0; L <= K; ++L) {
                BallId n{*idx, L};
                if (!seen.insert(n).second) continue;
                BallShape sh = ball_shape(p, n);
                bool hit = false;
                if (fp) {
                    for (const auto& x : fp->points)
                        hit = hit || point_in_shape(x, sh, false, sh.kind == BallShape::Line ? &slots : nullptr);
                } else {
                    hit = meets_shape(realize(F, p), sh);
                }
                if (hit) add(std::to_string(n.center) + "@" + std::to_string(L), std::move(sh));
            }
        }
    }

    const std::size_t N = codes.size(), W = (N + 63) / 64;
    std::vector<Bits> below(N, Bits(W, 0)), apart(N, Bits(W, 0));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            if (i == j) continue;
            if (shape_below(shapes[i], shapes[j])) below[i][j / 64] |= std::uint64_t{1} << (j % 64);
            if (j > i && shape_apart(shapes[i], shapes[j])) {
                apart[i][j / 64] |= std::uint64_t{1} << (j % 64);
                apart[j][i / 64] |= std::uint64_t{1} << (i % 64);
            }
        }

    Bits alive(W, 0);
    ClassSet ids;
    for (std::size_t i = 0; i < N; ++i) {
        alive[i / 64] |= std::uint64_t{1} << (i % 64);
        ids.push_back(i);
    }
    tr.stages.push_back({Ordinal(0), ids});
    u64 j = 0;
    while (!ids.empty()) {
        Bits next(W, 0);
        ClassSet nids;
        for (std::size_t n : ids) {
            Bits kids(W);
            for (std::size_t w = 0; w < W; ++w) kids[w] = below[n][w] & alive[w];
            bool ok = false;
            for (std::size_t u = 0; u < N && !ok; ++u)
                if ((kids[u / 64] >> (u % 64)) & 1) ok = any_and(apart[u], kids);
            if (ok) {
                next[n / 64] |= std::uint64_t{1} << (n % 64);
                nids.push_back(n);
            }
        }
        ++j;
        if (nids == ids) {
            tr.stabilized_empty = false;
            break;
        }
        alive = std::move(next);
        ids = std::move(nids);
        tr.stages.push_back({Ordinal(j), ids});
    }
    R.rank = Ordinal(j);
    tr.final_rank = R.rank;
    tr.class_desc = std::move(codes);
    return R;
}

}  // namespace cbr
