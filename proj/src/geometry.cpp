#include <algorithm>
#include <set>

#include "cbr/engine.hpp"

namespace cbr {

namespace {

mpz_class den_of(const Rational& x) { return x.raw().get_den(); }

void fold(mpz_class& d, const Rational& x) { d = lcm(d, den_of(x)); }

const Rational& coord(const Point& x) {
    if (auto* r = std::get_if<Rational>(&x.v)) return *r;
    if (auto* s = std::get_if<SumPoint>(&x.v)) return coord(*s->inner);
    throw EngineError("not a line point: " + x.str());
}

std::uint32_t group_of(const Point& x) {
    if (auto* s = std::get_if<SumPoint>(&x.v)) return s->part;
    return 0;
}

// transport applied, in the coordinates where the ball radius is r / scale
Rational u_of(const Presentation& p, const Rational& x) { return p.transport ? p.transport->apply(x) : x; }
Rational x_of(const Presentation& p, const Rational& u) { return p.transport ? p.transport->invert(u) : u; }

unsigned height_bound(std::size_t n) {
    unsigned h = 0;
    while ((std::size_t{2} << h) <= n) ++h;
    return h;
}

}  // namespace

std::vector<Point> top_level_points(const ClosedSetSpec& F) {
    if (set_is_empty(F)) return {};
    ClosedSetSpec cur = F;
    for (int guard = 0; guard < 64; ++guard) {
        ClosedSetSpec next = cb_derivative(cur);
        if (set_is_empty(next)) {
            if (is_branch_set(cur)) throw EngineError("top level of a branch set is not finite");
            return sample_points(cur, 0);
        }
        cur = std::move(next);
    }
    throw EngineError("derivative chain too long");
}

Rational presentation_distance(const Presentation& p, const Point& a, const Point& b) {
    if (p.transport) return distance(*p.space, p.transport->apply(a), p.transport->apply(b));
    return distance(*p.space, a, b);
}

std::uint32_t separation_level(const Presentation& p, const std::vector<Point>& pts) {
    if (pts.size() < 2) return 0;
    std::optional<Rational> g;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            Rational d = presentation_distance(p, pts[i], pts[j]);
            if (!g || d < *g) g = d;
        }
    Rational half = *g / Rational(2);
    std::uint32_t k = 0;
    while (radius(p, k) > half) {
        if (++k > 200) throw EngineError("separation level out of range");
    }
    return k;
}

std::vector<Point> center_cover(const Presentation& p, const std::vector<Point>& pts, const std::vector<Point>& extra,
                                std::uint32_t levels, std::uint32_t first) {
    auto [base, scale] = peel(*p.space);
    std::vector<Point> out;
    auto push = [&](Point x) {
        if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(std::move(x));
    };
    const std::uint32_t top = std::max<std::uint32_t>(levels, 1);
    const std::size_t kMaxCenters = 6000;

    if (base->family() == Family::Finite) {
        const auto& fs = std::get<FiniteSpace>(base->v);
        for (std::size_t i = 0; i < fs.labels.size(); ++i) push(finite_point(i));
        return out;
    }

    // lattice unit: every constant of the witness constraint system is a multiple of 1/D
    mpz_class D = 1;
    for (std::uint32_t k = 0; k <= top; ++k) fold(D, radius(p, k) / scale);
    // a useful ball holds a point in its open extent, so its centre is within R0 of one
    Rational R0 = radius(p, first) / scale;
    std::vector<Point> all = pts;
    all.insert(all.end(), extra.begin(), extra.end());

    if (base->family() == Family::Hedgehog) {
        std::set<u64> spines;
        u64 hi = 0;
        for (const auto& x : all) {
            const auto& h = std::get<HedgePoint>(x.v);
            fold(D, h.t);
            if (h.t.sign() > 0) spines.insert(h.spine);
            hi = std::max(hi, h.spine);
        }
        spines.insert(hi + 1);  // one generic spine
        // sums of two centre variables appear; halve once more for them
        Rational step(mpq_class(1, D * (mpz_class(1) << (height_bound(pts.size()) + 3))));
        std::size_t per = static_cast<std::size_t>((Rational(1) / step).to_double()) + 1;
        if (per * spines.size() > kMaxCenters) throw EngineError("centre lattice too large on the hedgehog");
        push(hedge_point(0, Rational(0)));
        for (u64 s : spines)
            for (Rational t = step; t <= Rational(1); t += step) push(hedge_point(s, t));
        return out;
    }

    if (base->family() != Family::Interval && base->family() != Family::Line && base->family() != Family::Amalgam)
        throw EngineError("no centre cover for " + family_name(base->family()));

    auto slots = line_slots(*base);
    const auto* am = std::get_if<AmalgamSum>(&base->v);
    std::uint32_t groups = am ? static_cast<std::uint32_t>(am->parts.size()) : 1;
    std::vector<std::optional<std::pair<Rational, Rational>>> span(groups);
    auto widen = [&](std::uint32_t g, const Rational& u) {
        if (!span[g]) span[g] = {u, u};
        else span[g] = std::pair{min(span[g]->first, u), max(span[g]->second, u)};
    };
    for (const auto& x : all) {
        Rational u = u_of(p, coord(x));
        fold(D, u);
        widen(group_of(x), u);
    }
    if (am) {
        for (std::uint32_t g = 0; g < groups; ++g) {
            fold(D, am->parts[g].anchor);
            fold(D, am->parts[g].bridge);
            widen(g, am->parts[g].anchor);
        }
    }
    for (const auto& sl : slots) {
        if (!sl.comp.lo_inf) fold(D, u_of(p, sl.comp.lo));
        if (!sl.comp.hi_inf) fold(D, u_of(p, sl.comp.hi));
    }
    Rational step(mpq_class(1, D * (mpz_class(1) << (height_bound(pts.size()) + (am ? 3 : 2)))));

    const Point* excluded = p.dense.rule == DenseRule::ExcludePoint && p.dense.excluded ? &*p.dense.excluded : nullptr;
    for (const auto& sl : slots) {
        if (!span[sl.group]) continue;
        Rational lo = span[sl.group]->first - R0, hi = span[sl.group]->second + R0;
        // slot in u coordinates
        Rational a = lo, b = hi;
        if (!sl.comp.lo_inf) {
            Rational e1 = u_of(p, sl.comp.lo), e2 = u_of(p, sl.comp.hi);
            a = max(a, min(e1, e2));
            b = min(b, max(e1, e2));
        }
        if (b < a) continue;
        mpq_class first = a.raw() / step.raw();
        mpz_class fi = first.get_num() / first.get_den();
        if (Rational(mpq_class(fi)) * step < a) fi += 1;
        std::size_t guard = 0;
        for (Rational u = Rational(mpq_class(fi)) * step; u <= b; u += step) {
            if (++guard + out.size() > kMaxCenters) throw EngineError("centre lattice too large");
            Point x = line_point(x_of(p, u));
            if (am) x = sum_point(sl.group, x);
            if (excluded && x == *excluded) {
                Rational v = u + step / Rational(2);
                x = line_point(x_of(p, v));
                if (am) x = sum_point(sl.group, x);
            }
            push(std::move(x));
        }
    }
    return out;
}

bool accumulates(const ClosedSetSpec& F, const BallShape& b) {
    if (b.kind != BallShape::Line) return false;
    // right accumulation at a needs (a, a+ε) inside the segment: a ∈ [lo, hi)
    auto right = [](const Seg& s, const Rational& a) {
        if (s.empty) return false;
        if (!s.lo_inf && a < s.lo) return false;
        if (!s.hi_inf && !(a < s.hi)) return false;
        return true;
    };
    auto left = [](const Seg& s, const Rational& a) {
        if (s.empty) return false;
        if (!s.lo_inf && !(s.lo < a)) return false;
        if (!s.hi_inf && s.hi < a) return false;
        return true;
    };
    if (auto* c = std::get_if<ConvergentPackage>(&F.v)) {
        for (const auto& s : b.l_open)
            for (const auto& q : c->seqs) {
                if (q.c.sign() > 0 && right(s, q.a)) return true;
                if (q.c.sign() < 0 && left(s, q.a)) return true;
            }
        return false;
    }
    if (auto* e = std::get_if<OrdinalEmbedding>(&F.v)) {
        if (Ordinal(e->d) >= e->alpha) return false;
        // limit points of the model are approached from the right; affine maps keep or flip the side
        ClosedSetSpec lim = cb_derivative(F);
        BallShape h = b;
        for (auto& s : h.l_open) {
            if (s.empty) continue;
            if (e->scale.sign() > 0) {
                s.lo_closed = true;
                s.hi_closed = false;
            } else {
                s.lo_closed = false;
                s.hi_closed = true;
            }
            if (!s.lo_inf && !s.hi_inf && s.lo == s.hi) s.empty = true;
        }
        return meets_shape(lim, h, false);
    }
    return false;
}

}  // namespace cbr
