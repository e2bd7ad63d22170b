#include <algorithm>

#include "cbr/engine.hpp"

namespace cbr {

namespace {

const Ordinal kOne(1);
const std::size_t kMaxLocal = 16;

bool branch_space(const Presentation& p) {
    auto f = peel(*p.space).first->family();
    return f == Family::Baire || f == Family::UltraTable;
}

std::vector<ClosedSetSpec> derivatives(const ClosedSetSpec& F) {
    std::vector<ClosedSetSpec> out{F};
    while (out.size() < 64) {
        ClosedSetSpec next = cb_derivative(out.back());
        if (set_is_empty(next)) break;
        out.push_back(std::move(next));
    }
    return out;
}

bool shape_meets(const Presentation& p, const ClosedSetSpec& F, const BallShape& b) {
    if (auto* f = std::get_if<FinitePoints>(&F.v)) {
        std::vector<Slot> slots;
        if (b.kind == BallShape::Line) slots = line_slots(*p.space);
        for (const auto& x : f->points)
            if (point_in_shape(x, b, false, b.kind == BallShape::Line ? &slots : nullptr)) return true;
        return false;
    }
    return meets_shape(F, b);
}

std::vector<Branch> finite_branches(const ClosedSetSpec& G) {
    std::vector<Branch> bs;
    for (const auto& x : std::get<FinitePoints>(G.v).points) bs.push_back(std::get<Branch>(x.v));
    return bs;
}

// longest forced prefix before the last branching, for truncation depth
std::optional<std::uint32_t> term_height(const Term& t) {
    using K = BranchTermNode;
    switch (t->kind) {
        case K::Empty:
        case K::Single: return 0;
        case K::Base:
        case K::BaseWhere: return 1;
        case K::Prepend: {
            auto h = term_height(t->inner);
            if (!h) return std::nullopt;
            return *h + static_cast<std::uint32_t>(t->word.size());
        }
        case K::Subst: return term_height(t->inner);
        case K::DupHead: {
            auto h = term_height(t->inner);
            if (!h) return std::nullopt;
            return *h + 1;
        }
        case K::UnionFin: {
            std::uint32_t m = 1;
            for (const auto& part : t->parts) {
                auto h = term_height(part);
                if (!h) return std::nullopt;
                m = std::max(m, *h);
            }
            return m;
        }
        case K::IndexedPrimeUnion: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

bool engine_supports(const Presentation& p, const ClosedSetSpec& F, std::string* why) {
    auto fail = [&](std::string m) {
        if (why) *why = std::move(m);
        return false;
    };
    try {
        check_ambient(F, *p.space);
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    if (set_is_empty(F)) return true;
    auto fam = peel(*p.space).first->family();
    bool finite = std::holds_alternative<FinitePoints>(F.v);
    switch (fam) {
        case Family::Baire:
        case Family::UltraTable:
            if (p.schedule != Schedule::AlignedUltra)
                return fail("branch spaces are ranked with the aligned schedule only");
            return true;
        case Family::Finite:
        case Family::Hedgehog:
            if (!finite) return fail("only finite point sets on " + family_name(fam));
            return true;
        case Family::Interval:
        case Family::Line:
            return true;
        case Family::Amalgam:
            if (!finite) return fail("only finite point sets on amalgams");
            return true;
        default: return fail("unsupported space " + p.space->describe());
    }
}

RankResult dp_rank(const Presentation& p, const ClosedSetSpec& F, const Ordinal& cap) {
    std::string why;
    if (!engine_supports(p, F, &why)) throw EngineError(why);
    RankResult R;
    auto& tr = R.trace;

    if (branch_space(p)) {
        tr.engine = "tree";
        auto [rank, table] = tree_rank(p, F);
        R.rank = rank;
        for (const auto& [name, v] : table.entries) tr.class_desc.push_back(name + " nu=" + ord_format(v));
        // stages where the alive set changes: successors of attained ν, plus limits below the rank
        std::vector<Ordinal> marks{Ordinal(0)};
        for (const auto& e : table.entries) marks.push_back(e.second + kOne);
        for (u64 j = 1; Ordinal::omega() * Ordinal(j) < rank; ++j) marks.push_back(Ordinal::omega() * Ordinal(j));
        std::sort(marks.begin(), marks.end());
        marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
        for (const auto& s : marks) {
            if (s > rank) break;
            ClassSet alive;
            for (std::size_t i = 0; i < table.entries.size(); ++i)
                if (table.entries[i].second >= s) alive.push_back(i);
            tr.stages.push_back({s, alive});
        }
    } else {
        tr.engine = "quotient";
        auto ders = derivatives(F);
        Ordinal offset(0);
        std::vector<Point> top;
        if (!set_is_empty(F)) {
            offset = Ordinal::omega() * Ordinal(ders.size() - 1);
            top = top_level_points(F);
        }
        auto Q = build_point_quotient(p, top);
        tr.offset = offset;
        tr.class_desc = Q.class_desc;
        for (std::size_t a = 0; a < Q.num_classes; ++a)
            for (std::size_t b = 0; b < Q.num_classes; ++b)
                if (Q.below[a][b]) tr.edges.emplace_back(a, b);
        ClassSet alive = all_classes(Q);
        u64 j = 0;
        tr.stages.push_back({offset, alive});
        while (!alive.empty()) {
            ClassSet next = dp_step(Q, alive);
            ++j;
            if (next == alive) {
                tr.stabilized_empty = false;
                break;
            }
            alive = std::move(next);
            tr.stages.push_back({offset + Ordinal(j), alive});
        }
        R.rank = set_is_empty(F) ? Ordinal(0) : offset + Ordinal(j);
    }
    tr.final_rank = R.rank;
    if (R.rank > cap) throw EngineError("rank " + ord_format(R.rank) + " exceeds the cap " + ord_format(cap));
    return R;
}

std::optional<Ordinal> ball_rank(const Presentation& p, const ClosedSetSpec& F, const BallId& n) {
    return ball_rank(p, F, dense_point(p, n.center), n.level);
}

std::optional<Ordinal> ball_rank(const Presentation& p, const ClosedSetSpec& F, const Point& center,
                                 std::uint32_t level) {
    std::string why;
    if (!engine_supports(p, F, &why)) throw EngineError(why);
    if (set_is_empty(F)) return std::nullopt;
    BallShape b = ball_shape(p, center, level);

    if (branch_space(p)) {
        auto prefix = b.center.prefix(b.cyl_open);
        ClosedSetSpec G = realize(F, p);
        if (std::holds_alternative<FinitePoints>(G.v)) {
            std::vector<Branch> in;
            for (const auto& br : finite_branches(G)) {
                if (br.prefix(prefix.size()) != prefix) continue;
                Branch t = br;
                for (std::size_t i = 0; i < prefix.size(); ++i) t = branch_tail(t);
                in.push_back(t);
            }
            return node_rank(in);
        }
        const Term& t = std::holds_alternative<BranchFamily>(G.v) ? std::get<BranchFamily>(G.v).term
                                                                   : std::get<SwitchImage>(G.v).image;
        Term r = residual(t, prefix);
        if (!r || term_empty(r)) return std::nullopt;
        return node_rank(r);
    }

    // ρ(n) = ω·k + local rank over the level-k points inside n
    auto ders = derivatives(F);
    std::size_t k = 0;
    for (std::size_t j = 1; j < ders.size(); ++j)
        if (accumulates(ders[j - 1], b)) k = j;
    if (k == 0 && !shape_meets(p, F, b)) return std::nullopt;

    std::vector<Point> S;
    {
        const ClosedSetSpec& Dk = ders[k];
        std::vector<Point> cand;
        if (auto* f = std::get_if<FinitePoints>(&Dk.v)) cand = f->points;
        else cand = sample_points(Dk, 40);
        std::vector<Slot> slots;
        if (b.kind == BallShape::Line) slots = line_slots(*p.space);
        for (const auto& x : cand) {
            if (!point_in_shape(x, b, false, b.kind == BallShape::Line ? &slots : nullptr)) continue;
            if (std::find(S.begin(), S.end(), x) == S.end()) S.push_back(x);
            if (S.size() >= kMaxLocal) break;
        }
    }
    Ordinal base = Ordinal::omega() * Ordinal(k);
    if (S.empty()) return base;

    auto Q = build_point_quotient(p, S, b, center);
    ClassSet alive = all_classes(Q);
    u64 local = 0;
    for (u64 j = 0; !alive.empty(); ++j) {
        bool pair = false;
        for (std::size_t x = 0; x < alive.size() && !pair; ++x)
            for (std::size_t y = x; y < alive.size() && !pair; ++y) pair = Q.apart[alive[x]][alive[y]];
        if (!pair) break;
        local = j + 1;
        ClassSet next = dp_step(Q, alive);
        if (next == alive) break;
        alive = std::move(next);
    }
    return base + Ordinal(local);
}

std::optional<DepthBound> witness_depth_bound(const Presentation& p, const ClosedSetSpec& F) {
    std::string why;
    if (!engine_supports(p, F, &why)) return std::nullopt;
    if (set_is_empty(F)) return DepthBound{0, "empty set: no balls"};

    if (branch_space(p)) {
        ClosedSetSpec G = realize(F, p);
        if (std::holds_alternative<FinitePoints>(G.v)) {
            auto bs = finite_branches(G);
            if (bs.size() == 1) return DepthBound{1, "single branch: the root ball alone"};
            std::size_t m = 0;
            for (std::size_t i = 0; i < bs.size(); ++i)
                for (std::size_t j = i + 1; j < bs.size(); ++j) {
                    std::size_t d = 0;
                    while (bs[i].at(d) == bs[j].at(d)) ++d;
                    m = std::max(m, d + 1);
                }
            return DepthBound{static_cast<std::uint32_t>(m + 1),
                              "branches separate by length " + std::to_string(m) + "; one more level for leaves"};
        }
        const Term& t = std::holds_alternative<BranchFamily>(G.v) ? std::get<BranchFamily>(G.v).term
                                                                   : std::get<SwitchImage>(G.v).image;
        if (t->kind == BranchTermNode::Single) return DepthBound{1, "single branch: the root ball alone"};
        auto h = term_height(t);
        if (!h) return std::nullopt;
        return DepthBound{*h + 2, "branching ends by length " + std::to_string(*h) + "; two levels for leaves"};
    }

    if (cb_rank(F) > kOne) return std::nullopt;
    auto pts = top_level_points(F);
    if (pts.size() == 1) return DepthBound{1, "single point: the root ball alone"};
    std::uint32_t s = separation_level(p, pts);
    return DepthBound{s + 1, "balls at level " + std::to_string(s) + " hold at most one point; one more for strict apartness"};
}

RefinementReport refinement_check(const Presentation& p, const ClosedSetSpec& F, const DerivativeTrace& trace,
                                  std::size_t samples) {
    RefinementReport rep;
    if (set_is_empty(F)) return rep;
    auto violate = [&](std::string m) {
        rep.ok = false;
        if (rep.violations.size() < 20) rep.violations.push_back(std::move(m));
    };

    std::vector<Point> centers;
    std::vector<ClosedSetSpec> ders;
    if (branch_space(p)) {
        ders = {F};
        for (u64 i = 0; i < samples; ++i) centers.push_back(dense_point(p, i));
    } else {
        auto fam = peel(*p.space).first->family();
        ders = derivatives(F);
        for (const auto& D : ders) {
            auto pts = sample_points(D, 5);
            for (std::size_t i = 0; i < pts.size() && i < samples / ders.size() + 1; ++i) centers.push_back(pts[i]);
        }
        std::size_t cap = samples;
        if (fam == Family::Finite) cap = std::min(cap, std::get<FiniteSpace>(peel(*p.space).first->v).labels.size());
        for (u64 i = 0; i < cap && centers.size() < samples; ++i) centers.push_back(dense_point(p, i));
    }
    for (const auto& c : centers) {
        if (!dense_index(p, c)) continue;
        for (std::uint32_t level = 0; level < 5; ++level) {
            BallShape b = ball_shape(p, c, level);
            std::optional<Ordinal> r;
            bool ranked = false;
            for (std::size_t j = 0; j < ders.size(); ++j) {
                bool hit = branch_space(p) ? meets_shape(realize(ders[j], p), b) : shape_meets(p, ders[j], b);
                if (!hit) continue;
                if (!ranked) {
                    r = ball_rank(p, F, c, level);
                    ranked = true;
                    ++rep.checked;
                }
                Ordinal need = Ordinal::omega() * Ordinal(j);
                if (!r || *r < need)
                    violate("ball " + c.str() + "@" + std::to_string(level) + " meets derivative " + std::to_string(j) +
                            " but has rank " + (r ? ord_format(*r) : std::string("none")));
            }
            if (ranked && r && !(*r < trace.final_rank))
                violate("ball " + c.str() + "@" + std::to_string(level) + " rank " + ord_format(*r) +
                        " not below the set rank " + ord_format(trace.final_rank));
        }
    }
    return rep;
}

}  // namespace cbr
