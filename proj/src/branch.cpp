#include "cbr/branch.hpp"

#include <algorithm>
#include <set>

#include "cbr/enumeration.hpp"

namespace cbr {

namespace en = enumeration;

// ---------------------------------------------------------------- symbol maps

namespace {

std::optional<u64> checked_pow(u64 p, u64 e) {
    u64 r = 1;
    for (u64 k = 0; k < e; ++k) {
        if (r > ~u64{0} / p) return std::nullopt;
        r *= p;
    }
    return r;
}

}  // namespace

std::optional<u64> SymbolMap::apply(u64 n) const {
    switch (kind) {
        case Double:
            if (n > (~u64{0}) / 2) return std::nullopt;
            return 2 * n;
        case DoublePlusOne:
            if (n >= (~u64{0}) / 2) return std::nullopt;
            return 2 * n + 1;
        case PrimePow:
            if (n == ~u64{0}) return std::nullopt;
            return checked_pow(en::prime(i), n + 1);
        case Compose: {
            std::optional<u64> v = n;
            for (const auto& p : parts) {
                v = p.apply(*v);
                if (!v) return std::nullopt;
            }
            return v;
        }
    }
    return std::nullopt;
}

std::optional<u64> SymbolMap::invert(u64 m) const {
    switch (kind) {
        case Double:
            if (m % 2) return std::nullopt;
            return m / 2;
        case DoublePlusOne:
            if (m % 2 == 0) return std::nullopt;
            return m / 2;
        case PrimePow: {
            auto pp = en::prime_power(m);
            if (!pp || pp->first != i) return std::nullopt;
            return pp->second;
        }
        case Compose: {
            std::optional<u64> v = m;
            for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
                v = it->invert(*v);
                if (!v) return std::nullopt;
            }
            return v;
        }
    }
    return std::nullopt;
}

std::string SymbolMap::str() const {
    switch (kind) {
        case Double: return "Double";
        case DoublePlusOne: return "DoublePlusOne";
        case PrimePow: return "PrimePow(" + std::to_string(i) + ")";
        case Compose: {
            std::string s = "Compose(";
            for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? "," : "") + parts[k].str();
            return s + ")";
        }
    }
    return "?";
}

std::optional<Branch> map_branch(const SymbolMap& m, const Branch& b) {
    std::vector<u64> w;
    for (u64 s : b.word) {
        auto v = m.apply(s);
        if (!v) return std::nullopt;
        w.push_back(*v);
    }
    auto t = m.apply(b.tail);
    if (!t) return std::nullopt;
    return Branch::make(std::move(w), *t);
}

std::optional<Branch> unmap_branch(const SymbolMap& m, const Branch& b) {
    std::vector<u64> w;
    for (u64 s : b.word) {
        auto v = m.invert(s);
        if (!v) return std::nullopt;
        w.push_back(*v);
    }
    auto t = m.invert(b.tail);
    if (!t) return std::nullopt;
    return Branch::make(std::move(w), *t);
}

Branch branch_tail(const Branch& b) {
    if (b.word.empty()) return b;
    return Branch::make(std::vector<u64>(b.word.begin() + 1, b.word.end()), b.tail);
}

Branch branch_cons(u64 s, const Branch& b) {
    std::vector<u64> w{s};
    w.insert(w.end(), b.word.begin(), b.word.end());
    return Branch::make(std::move(w), b.tail);
}

Branch branch_concat(const std::vector<u64>& pre, const Branch& b) {
    std::vector<u64> w = pre;
    w.insert(w.end(), b.word.begin(), b.word.end());
    return Branch::make(std::move(w), b.tail);
}

SymbolPred pred_all() { return {"all", [](u64) { return true; }}; }
SymbolPred pred_none() { return {"none", [](u64) { return false; }}; }

u64 pred_count(const SymbolPred& p, u64 cap) {
    u64 c = 0;
    for (u64 n = 0; n < kPredScan && c < cap; ++n)
        if (p.test(n)) ++c;
    return c;
}

// ---------------------------------------------------------------- constructors

namespace {

Term mk(BranchTermNode n) { return std::make_shared<const BranchTermNode>(std::move(n)); }

}  // namespace

Term t_empty() { return mk({}); }

Term t_base() {
    BranchTermNode n;
    n.kind = BranchTermNode::Base;
    return mk(std::move(n));
}

Term t_base_where(SymbolPred p) {
    BranchTermNode n;
    n.kind = BranchTermNode::BaseWhere;
    n.pred = std::move(p);
    return mk(std::move(n));
}

Term t_single(Branch b) {
    BranchTermNode n;
    n.kind = BranchTermNode::Single;
    n.branch = std::move(b);
    return mk(std::move(n));
}

Term t_prepend(std::vector<u64> w, Term t) {
    if (w.empty()) return t;
    if (t->kind == BranchTermNode::Prepend) {
        w.insert(w.end(), t->word.begin(), t->word.end());
        t = t->inner;
    }
    BranchTermNode n;
    n.kind = BranchTermNode::Prepend;
    n.word = std::move(w);
    n.inner = std::move(t);
    return mk(std::move(n));
}

Term t_subst(SymbolMap m, Term t) {
    BranchTermNode n;
    n.kind = BranchTermNode::Subst;
    n.map = std::move(m);
    n.inner = std::move(t);
    return mk(std::move(n));
}

Term t_dup_head(Term t) {
    BranchTermNode n;
    n.kind = BranchTermNode::DupHead;
    n.inner = std::move(t);
    return mk(std::move(n));
}

Term t_union(std::vector<Term> parts) {
    std::erase_if(parts, [](const Term& t) { return !t || t->kind == BranchTermNode::Empty; });
    if (parts.empty()) return t_empty();
    if (parts.size() == 1) return parts[0];
    BranchTermNode n;
    n.kind = BranchTermNode::UnionFin;
    n.parts = std::move(parts);
    return mk(std::move(n));
}

Term t_prime_union(std::string desc, std::function<Term(u64)> member) {
    BranchTermNode n;
    n.kind = BranchTermNode::IndexedPrimeUnion;
    n.member_desc = std::move(desc);
    n.member = std::move(member);
    return mk(std::move(n));
}

// ---------------------------------------------------------------- queries

std::string term_str(const Term& t) {
    using K = BranchTermNode;
    switch (t->kind) {
        case K::Empty: return "Empty";
        case K::Base: return "Base";
        case K::BaseWhere: return "BaseWhere(" + t->pred.desc + ")";
        case K::Single: return "Single(" + t->branch.str() + ")";
        case K::Prepend: {
            std::string w;
            for (std::size_t i = 0; i < t->word.size(); ++i) w += (i ? "," : "") + std::to_string(t->word[i]);
            return "Prepend((" + w + ")," + term_str(t->inner) + ")";
        }
        case K::Subst: return "Subst(" + t->map.str() + "," + term_str(t->inner) + ")";
        case K::DupHead: return "DupHead(" + term_str(t->inner) + ")";
        case K::UnionFin: {
            std::string s = "UnionFin[";
            for (std::size_t i = 0; i < t->parts.size(); ++i) s += (i ? "," : "") + term_str(t->parts[i]);
            return s + "]";
        }
        case K::IndexedPrimeUnion: return "IndexedPrimeUnion(i->" + t->member_desc + ")";
    }
    return "?";
}

bool term_empty(const Term& t) {
    using K = BranchTermNode;
    switch (t->kind) {
        case K::Empty: return true;
        case K::Base:
        case K::Single: return false;
        case K::BaseWhere: return pred_count(t->pred, 1) == 0;
        case K::Prepend:
        case K::Subst:
        case K::DupHead: return term_empty(t->inner);
        case K::UnionFin:
            return std::all_of(t->parts.begin(), t->parts.end(), [](const Term& p) { return term_empty(p); });
        case K::IndexedPrimeUnion: return term_empty(t->member(0));
    }
    return true;
}

Term subtree(const Term& t, u64 s) {
    using K = BranchTermNode;
    Term out;
    switch (t->kind) {
        case K::Empty: return nullptr;
        case K::Base: return t_single(Branch::constant(s));
        case K::BaseWhere: return t->pred.test(s) ? t_single(Branch::constant(s)) : nullptr;
        case K::Single: return t->branch.at(0) == s ? t_single(branch_tail(t->branch)) : nullptr;
        case K::Prepend:
            if (t->word[0] != s) return nullptr;
            out = t->word.size() > 1 ? t_prepend(std::vector<u64>(t->word.begin() + 1, t->word.end()), t->inner) : t->inner;
            break;
        case K::Subst: {
            auto m = t->map.invert(s);
            if (!m) return nullptr;
            Term sub = subtree(t->inner, *m);
            if (!sub) return nullptr;
            out = t_subst(t->map, sub);
            break;
        }
        case K::DupHead: {
            Term sub = subtree(t->inner, s);
            if (!sub) return nullptr;
            out = t_prepend({s}, sub);
            break;
        }
        case K::UnionFin: {
            std::vector<Term> subs;
            for (const auto& p : t->parts)
                if (Term sub = subtree(p, s)) subs.push_back(sub);
            out = t_union(std::move(subs));
            break;
        }
        case K::IndexedPrimeUnion: {
            auto pp = en::prime_power(s);
            if (!pp || pp->second != 0) return nullptr;
            out = t->member(pp->first);
            break;
        }
    }
    if (!out || term_empty(out)) return nullptr;
    return out;
}

Term residual(const Term& t, const std::vector<u64>& prefix) {
    Term cur = t;
    for (u64 s : prefix) {
        cur = subtree(cur, s);
        if (!cur) return nullptr;
    }
    return term_empty(cur) ? nullptr : cur;
}

bool term_contains(const Term& t, const Branch& b) {
    using K = BranchTermNode;
    switch (t->kind) {
        case K::Empty: return false;
        case K::Base: return b.word.empty();
        case K::BaseWhere: return b.word.empty() && t->pred.test(b.tail);
        case K::Single: return t->branch == b;
        case K::Prepend: {
            for (std::size_t i = 0; i < t->word.size(); ++i)
                if (b.at(i) != t->word[i]) return false;
            Branch rest = b;
            for (std::size_t i = 0; i < t->word.size(); ++i) rest = branch_tail(rest);
            return term_contains(t->inner, rest);
        }
        case K::Subst: {
            auto pre = unmap_branch(t->map, b);
            return pre && term_contains(t->inner, *pre);
        }
        case K::DupHead: return b.at(0) == b.at(1) && term_contains(t->inner, branch_tail(b));
        case K::UnionFin:
            return std::any_of(t->parts.begin(), t->parts.end(), [&](const Term& p) { return term_contains(p, b); });
        case K::IndexedPrimeUnion: {
            auto pp = en::prime_power(b.at(0));
            return pp && pp->second == 0 && term_contains(t->member(pp->first), branch_tail(b));
        }
    }
    return false;
}

std::vector<Branch> term_branches(const Term& t, u64 bound) {
    using K = BranchTermNode;
    std::vector<Branch> out;
    switch (t->kind) {
        case K::Empty: break;
        case K::Base:
            for (u64 n = 0; n < bound; ++n) out.push_back(Branch::constant(n));
            break;
        case K::BaseWhere:
            for (u64 n = 0; n < bound; ++n)
                if (t->pred.test(n)) out.push_back(Branch::constant(n));
            break;
        case K::Single: out.push_back(t->branch); break;
        case K::Prepend:
            for (const auto& b : term_branches(t->inner, bound)) out.push_back(branch_concat(t->word, b));
            break;
        case K::Subst:
            for (const auto& b : term_branches(t->inner, bound))
                if (auto m = map_branch(t->map, b)) out.push_back(*m);
            break;
        case K::DupHead:
            for (const auto& b : term_branches(t->inner, bound)) out.push_back(branch_cons(b.at(0), b));
            break;
        case K::UnionFin:
            for (const auto& p : t->parts)
                for (const auto& b : term_branches(p, bound)) out.push_back(b);
            break;
        case K::IndexedPrimeUnion:
            for (u64 i = 0; i < bound; ++i)
                for (const auto& b : term_branches(t->member(i), bound)) out.push_back(branch_cons(en::prime(i), b));
            break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<u64> root_symbols(const Term& t, std::size_t limit) {
    using K = BranchTermNode;
    std::set<u64> out;
    auto add = [&](u64 s) {
        if (out.size() < limit) out.insert(s);
    };
    switch (t->kind) {
        case K::Empty: break;
        case K::Base:
            for (u64 n = 0; n < limit; ++n) add(n);
            break;
        case K::BaseWhere:
            for (u64 n = 0; n < kPredScan && out.size() < limit; ++n)
                if (t->pred.test(n)) add(n);
            break;
        case K::Single: add(t->branch.at(0)); break;
        case K::Prepend:
            if (!term_empty(t->inner)) add(t->word[0]);
            break;
        case K::Subst:
            for (u64 s : root_symbols(t->inner, limit))
                if (auto m = t->map.apply(s)) add(*m);
            break;
        case K::DupHead:
            for (u64 s : root_symbols(t->inner, limit)) add(s);
            break;
        case K::UnionFin:
            for (const auto& p : t->parts)
                for (u64 s : root_symbols(p, limit)) add(s);
            break;
        case K::IndexedPrimeUnion:
            if (!term_empty(t->member(0)))
                for (u64 i = 0; i < limit; ++i) add(en::prime(i));
            break;
    }
    return {out.begin(), out.end()};
}

std::vector<u64> forced_extension(const Term& t, const std::vector<u64>& prefix, std::size_t len) {
    std::vector<u64> w = prefix;
    Term cur = residual(t, prefix);
    if (!cur) return w;
    while (w.size() < len) {
        auto syms = root_symbols(cur, 2);
        if (syms.size() != 1) break;
        w.push_back(syms[0]);
        cur = subtree(cur, syms[0]);
        if (!cur) break;
    }
    return w;
}

// ---------------------------------------------------------------- enumeration

namespace {

// finite size of a term, or nullopt when infinite
std::optional<u64> term_size(const Term& t) {
    using K = BranchTermNode;
    switch (t->kind) {
        case K::Empty: return 0;
        case K::Base: return std::nullopt;
        case K::BaseWhere: {
            // predicates with few small matches are treated as finite
            u64 c = pred_count(t->pred, 17);
            if (c <= 16) return c;
            return std::nullopt;
        }
        case K::Single: return 1;
        case K::Prepend:
        case K::Subst:
        case K::DupHead: return term_size(t->inner);
        case K::UnionFin: {
            u64 total = 0;
            for (const auto& p : t->parts) {
                auto s = term_size(p);
                if (!s) return std::nullopt;
                total += *s;
            }
            return total;
        }
        case K::IndexedPrimeUnion: return term_empty(t->member(0)) ? std::optional<u64>(0) : std::nullopt;
    }
    return 0;
}

std::optional<u64> nth_match(const SymbolPred& p, u64 i) {
    for (u64 n = 0; n < (u64{1} << 22); ++n)
        if (p.test(n) && i-- == 0) return n;
    return std::nullopt;
}

}  // namespace

std::optional<Branch> term_point(const Term& t, u64 i) {
    using K = BranchTermNode;
    switch (t->kind) {
        case K::Empty: return std::nullopt;
        case K::Base: return Branch::constant(i);
        case K::BaseWhere: {
            auto n = nth_match(t->pred, i);
            if (!n) return std::nullopt;
            return Branch::constant(*n);
        }
        case K::Single:
            if (i) return std::nullopt;
            return t->branch;
        case K::Prepend: {
            auto b = term_point(t->inner, i);
            if (!b) return std::nullopt;
            return branch_concat(t->word, *b);
        }
        case K::Subst: {
            auto b = term_point(t->inner, i);
            if (!b) return std::nullopt;
            auto m = map_branch(t->map, *b);
            if (!m) throw TermError("symbol overflow while enumerating " + term_str(t));
            return m;
        }
        case K::DupHead: {
            auto b = term_point(t->inner, i);
            if (!b) return std::nullopt;
            return branch_cons(b->at(0), *b);
        }
        case K::UnionFin: {
            std::vector<const Term*> inf;
            for (const auto& p : t->parts) {
                auto s = term_size(p);
                if (!s) {
                    inf.push_back(&p);
                    continue;
                }
                if (i < *s) return term_point(p, i);
                i -= *s;
            }
            if (inf.empty()) return std::nullopt;
            return term_point(*inf[i % inf.size()], i / inf.size());
        }
        case K::IndexedPrimeUnion: {
            if (term_empty(t->member(0))) return std::nullopt;
            if (term_size(t->member(0))) throw TermError("enumeration needs infinite family members");
            auto [a, b] = en::unpair(i);
            auto pt = term_point(t->member(a), b);
            if (!pt) return std::nullopt;
            return branch_cons(en::prime(a), *pt);
        }
    }
    return std::nullopt;
}

std::optional<u64> term_index(const Term& t, const Branch& b) {
    using K = BranchTermNode;
    if (!term_contains(t, b)) return std::nullopt;
    switch (t->kind) {
        case K::Empty: return std::nullopt;
        case K::Base: return b.tail;
        case K::BaseWhere: {
            u64 c = 0;
            for (u64 n = 0; n < b.tail; ++n)
                if (t->pred.test(n)) ++c;
            return c;
        }
        case K::Single: return 0;
        case K::Prepend: {
            Branch rest = b;
            for (std::size_t i = 0; i < t->word.size(); ++i) rest = branch_tail(rest);
            return term_index(t->inner, rest);
        }
        case K::Subst: return term_index(t->inner, *unmap_branch(t->map, b));
        case K::DupHead: return term_index(t->inner, branch_tail(b));
        case K::UnionFin: {
            u64 off = 0;
            std::vector<const Term*> inf;
            for (const auto& p : t->parts) {
                auto s = term_size(p);
                if (!s) {
                    inf.push_back(&p);
                    continue;
                }
                if (term_contains(p, b)) return off + *term_index(p, b);
                off += *s;
            }
            for (std::size_t k = 0; k < inf.size(); ++k)
                if (term_contains(*inf[k], b)) return off + *term_index(*inf[k], b) * inf.size() + k;
            return std::nullopt;
        }
        case K::IndexedPrimeUnion: {
            u64 a = en::prime_power(b.at(0))->first;
            auto j = term_index(t->member(a), branch_tail(b));
            if (!j) return std::nullopt;
            return en::pair(a, *j);
        }
    }
    return std::nullopt;
}

SpacePtr ultra_table(Term t, std::string description) {
    if (term_empty(t)) throw TermError("ultra table over an empty term");
    UltraTable u;
    u.description = description.empty() ? term_str(t) : std::move(description);
    u.term = t;
    u.point = [t](u64 i) { return term_point(t, i); };
    u.index = [t](const Branch& b) { return term_index(t, b); };
    u.forced = [t](const std::vector<u64>& prefix, std::size_t len) { return forced_extension(t, prefix, len); };
    return std::make_shared<const Space>(Space{std::move(u)});
}

}  // namespace cbr
