#include <algorithm>
#include <map>
#include <set>

#include "cbr/engine.hpp"

namespace cbr {

namespace {

const Ordinal kOne(1);

// multiset of node ranks of the children of a cylinder
struct Profile {
    std::vector<Ordinal> vals;
    u64 zeros = 0;                 // single-branch children, capped at 2
    std::vector<Ordinal> many;     // values carried by infinitely many children
    std::vector<Ordinal> families; // ν_0 + i for every i: supremum ν_0 + ω

    void absorb(const Profile& o) {
        vals.insert(vals.end(), o.vals.begin(), o.vals.end());
        zeros = std::min<u64>(2, zeros + o.zeros);
        many.insert(many.end(), o.many.begin(), o.many.end());
        families.insert(families.end(), o.families.begin(), o.families.end());
    }
    bool empty() const { return vals.empty() && zeros == 0 && many.empty() && families.empty(); }
};

Ordinal fam_sup(const Ordinal& v0) { return v0 + Ordinal::omega(); }

Ordinal combine(const Profile& P) {
    std::vector<Ordinal> attained = P.vals;
    if (P.zeros) attained.push_back(Ordinal(0));
    attained.insert(attained.end(), P.many.begin(), P.many.end());
    for (const auto& f : P.families) attained.push_back(f);

    auto count_ge = [&](const Ordinal& v) {
        u64 c = 0;
        for (const auto& x : P.vals)
            if (x >= v) ++c;
        if (v == Ordinal(0)) c += P.zeros;
        for (const auto& x : P.many)
            if (x >= v) c += 2;
        for (const auto& f : P.families)
            if (fam_sup(f) > v) c += 2;
        return c;
    };

    Ordinal best(0);
    for (const auto& v : attained) {
        if (v > best) best = v;
        if (count_ge(v) >= 2 && v + kOne > best) best = v + kOne;
    }
    for (const auto& f : P.families)
        if (fam_sup(f) > best) best = fam_sup(f);
    return best;
}

struct Ranker {
    NodeRankTable* table;
    std::map<const BranchTermNode*, std::optional<Ordinal>> memo;
    std::map<const BranchTermNode*, Profile> pmemo;
    std::vector<Term> keep;  // members built on the fly stay alive while memoized

    std::optional<Ordinal> nu(const Term& t) {
        auto it = memo.find(t.get());
        if (it != memo.end()) return it->second;
        keep.push_back(t);
        std::optional<Ordinal> v;
        if (!term_empty(t)) {
            using K = BranchTermNode;
            switch (t->kind) {
                case K::Single: v = Ordinal(0); break;
                case K::Prepend:
                case K::Subst:
                case K::DupHead: v = nu(t->inner); break;
                default: {
                    auto P = profile(t);
                    v = P.empty() ? Ordinal(0) : combine(P);
                }
            }
        }
        memo[t.get()] = v;
        if (table && v) {
            std::string s = term_str(t);
            if (s.size() > 160) s = s.substr(0, 157) + "...";
            table->entries.emplace_back(s, *v);
        }
        return v;
    }

    // children of the root cylinder of t
    Profile profile(const Term& t) {
        auto it = pmemo.find(t.get());
        if (it != pmemo.end()) return it->second;
        keep.push_back(t);
        Profile P = profile_of(t);
        pmemo[t.get()] = P;
        return P;
    }

    Profile profile_of(const Term& t) {
        using K = BranchTermNode;
        Profile P;
        if (term_empty(t)) return P;
        switch (t->kind) {
            case K::Empty: break;
            case K::Base: P.zeros = 2; break;
            case K::BaseWhere: P.zeros = pred_count(t->pred, 2); break;
            case K::Single: P.zeros = 1; break;
            case K::Prepend: {
                Term rest = t->word.size() > 1 ? t_prepend({t->word.begin() + 1, t->word.end()}, t->inner) : t->inner;
                if (auto v = nu(rest)) P.vals.push_back(*v);
                break;
            }
            case K::Subst:
            case K::DupHead: return profile(t->inner);
            case K::UnionFin: {
                check_disjoint_roots(t->parts);
                for (const auto& part : t->parts) P.absorb(profile(part));
                break;
            }
            case K::IndexedPrimeUnion: {
                // children p_i carry ν(member(i)); index symmetry: constant or affine in i
                const u64 kSpot = 4;  // higher indices hit u64 overflow of p_i^(k+1)
                std::vector<std::optional<Ordinal>> v;
                for (u64 i = 0; i < kSpot; ++i) v.push_back(nu(t->member(i)));
                bool placed = false;
                for (u64 s = 0; s <= 1 && !placed; ++s) {
                    bool all = true, constant = true, affine = true;
                    for (u64 i = s; i < kSpot; ++i) all = all && v[i].has_value();
                    if (!all) continue;
                    for (u64 i = s + 1; i < kSpot; ++i) {
                        constant = constant && *v[i] == *v[s];
                        affine = affine && *v[i] == *v[i - 1] + kOne;
                    }
                    if (!constant && !affine) continue;
                    for (u64 i = 0; i < s; ++i)
                        if (v[i]) P.vals.push_back(*v[i]);
                    if (constant) P.many.push_back(*v[s]);
                    else P.families.push_back(*v[s]);
                    placed = true;
                }
                if (!placed) throw EngineError("type graph not finite modulo symmetry: " + term_str(t).substr(0, 120));
                break;
            }
        }
        return P;
    }

    // indexed unions are root-disjoint by construction; the other parts are compared on their first symbols
    static void check_disjoint_roots(const std::vector<Term>& parts) {
        if (parts.size() < 2) return;
        std::set<u64> seen;
        for (const auto& part : parts) {
            if (part->kind == BranchTermNode::IndexedPrimeUnion || term_empty(part)) continue;
            for (u64 s : root_symbols(part, 64))
                if (!seen.insert(s).second) throw EngineError("union parts share the root symbol " + std::to_string(s));
        }
    }
};

}  // namespace

std::optional<Ordinal> node_rank(const Term& t, NodeRankTable* table) {
    Ranker r{table, {}, {}, {}};
    auto v = r.nu(t);
    if (table && v) table->root = *v;
    return v;
}

std::optional<Ordinal> node_rank(const std::vector<Branch>& finite) {
    if (finite.empty()) return std::nullopt;
    if (finite.size() == 1) return Ordinal(0);
    std::map<u64, std::vector<Branch>> groups;
    for (const auto& b : finite) groups[b.at(0)].push_back(branch_tail(b));
    Profile P;
    for (auto& [s, g] : groups) {
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        P.vals.push_back(*node_rank(g));
    }
    return combine(P);
}

std::pair<Ordinal, NodeRankTable> tree_rank(const Presentation& p, const ClosedSetSpec& F) {
    auto [base, c] = peel(*p.space);
    if (!is_ultrametric(*p.space) || (base->family() != Family::Baire && base->family() != Family::UltraTable))
        throw EngineError("tree engine needs the Baire space or an ultrametric table");
    if (p.schedule != Schedule::AlignedUltra) throw EngineError("tree engine needs the aligned schedule");
    NodeRankTable table;
    ClosedSetSpec G = realize(F, p);
    std::optional<Ordinal> v;
    if (set_is_empty(G)) v = std::nullopt;
    else if (auto* b = std::get_if<BranchFamily>(&G.v)) v = node_rank(b->term, &table);
    else if (auto* s = std::get_if<SwitchImage>(&G.v)) v = node_rank(s->image, &table);
    else if (auto* f = std::get_if<FinitePoints>(&G.v)) {
        std::vector<Branch> bs;
        for (const auto& x : f->points) bs.push_back(std::get<Branch>(x.v));
        v = node_rank(bs);
        table.entries.emplace_back(G.str(), v.value_or(Ordinal(0)));
    } else {
        throw EngineError("tree engine: unsupported set " + F.str());
    }
    if (!v) return {Ordinal(0), table};
    table.root = *v;
    return {*v + kOne, table};
}

}  // namespace cbr
