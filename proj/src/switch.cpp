#include "cbr/switch.hpp"

#include <functional>

#include "cbr/enumeration.hpp"

namespace cbr {

namespace en = enumeration;

namespace {

const Ordinal kTwo(2);

std::optional<u64> pow_checked(u64 p, u64 e) {
    u64 r = 1;
    for (u64 k = 0; k < e; ++k) {
        if (r > ~u64{0} / p) return std::nullopt;
        r *= p;
    }
    return r;
}

// stage used below a limit for the i-th prime
Ordinal stage_below(const Ordinal& lambda, u64 i) { return fundamental_seq(lambda, i + 1); }

bool sym(const Ordinal& a, u64 n) {
    if (a == kTwo) return true;
    if (is_successor(a)) return sym(ord_pred(a), n / 2);
    auto pp = en::prime_power(n);
    return pp && sym(stage_below(a, pp->first), pp->second);
}

std::size_t len(const Ordinal& a, u64 n) {
    if (a == kTwo) return 1;
    if (is_successor(a)) return len(ord_pred(a), n / 2) + 1;
    auto pp = en::prime_power(n);
    return len(stage_below(a, pp->first), pp->second) + 1;
}

std::vector<u64> tword(const Ordinal& a, u64 n) {
    if (a == kTwo) return {n};
    if (is_successor(a)) {
        u64 h = n % 2;
        SymbolMap m = h ? SymbolMap::dpo() : SymbolMap::dbl();
        std::vector<u64> out{h};
        for (u64 s : tword(ord_pred(a), n / 2)) out.push_back(*m.apply(s));
        return out;
    }
    auto pp = en::prime_power(n);
    SymbolMap m = SymbolMap::prime_pow(pp->first);
    std::vector<u64> out{en::prime(pp->first)};
    for (u64 s : tword(stage_below(a, pp->first), pp->second)) {
        auto v = m.apply(s);
        if (!v) throw TermError("switch word symbol overflow");
        out.push_back(*v);
    }
    return out;
}

u64 gen_symbol(const Ordinal& a, u64 j) {
    if (a == kTwo) return j;
    if (is_successor(a)) return 2 * gen_symbol(ord_pred(a), j / 2) + j % 2;
    auto [i, k] = en::unpair(j);
    auto v = pow_checked(en::prime(i), gen_symbol(stage_below(a, i), k) + 1);
    if (!v) throw TermError("switch generator symbol overflow");
    return *v;
}

using Acc = std::function<std::optional<u64>(std::size_t)>;

// the symbol n whose t-word could be a prefix of x
std::optional<u64> t_candidate(const Ordinal& a, const Acc& x) {
    auto h = x(0);
    if (!h) return std::nullopt;
    if (a == kTwo) return h;
    if (is_successor(a)) {
        if (*h > 1) return std::nullopt;
        u64 par = *h;
        Acc y = [&x, par](std::size_t i) -> std::optional<u64> {
            auto v = x(i + 1);
            if (!v || *v % 2 != par) return std::nullopt;
            return *v / 2;
        };
        auto m = t_candidate(ord_pred(a), y);
        if (!m || *m > (~u64{0} - 1) / 2) return std::nullopt;
        return 2 * *m + par;
    }
    auto pp = en::prime_power(*h);
    if (!pp || pp->second != 0) return std::nullopt;
    u64 i = pp->first;
    Acc y = [&x, i](std::size_t j) -> std::optional<u64> {
        auto v = x(j + 1);
        if (!v) return std::nullopt;
        auto q = en::prime_power(*v);
        if (!q || q->first != i) return std::nullopt;
        return q->second;
    };
    auto m = t_candidate(stage_below(a, i), y);
    if (!m) return std::nullopt;
    return pow_checked(en::prime(i), *m + 1);
}

bool has_prefix(const Branch& x, const std::vector<u64>& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
        if (x.at(i) != w[i]) return false;
    return true;
}

Branch drop(const Branch& x, std::size_t n) {
    Branch r = x;
    for (std::size_t i = 0; i < n; ++i) r = branch_tail(r);
    return r;
}

bool is_prime(u64 n) {
    auto pp = en::prime_power(n);
    return pp && pp->second == 0;
}

Term nonempty(Term t) { return term_empty(t) ? t_empty() : t; }

Term image(const Ordinal& a, const SymbolPred& A) {
    if (a == kTwo) return nonempty(A.desc == "all" ? t_base() : t_base_where(A));
    std::string as = ord_format(a);
    if (is_successor(a)) {
        Ordinal p = ord_pred(a);
        std::string ps = ord_format(p);
        SymbolPred fixed{"n∈" + A.desc + "∧n≥2∧n/2∉Sym[" + ps + "]",
                         [A, p](u64 n) { return n >= 2 && A.test(n) && !sym(p, n / 2); }};
        std::vector<Term> parts{nonempty(t_base_where(fixed))};
        for (u64 h : {0, 1}) {
            SymbolPred Ah{"{c:2c+" + std::to_string(h) + "∈" + A.desc + "∧(c∈Sym[" + ps + "]∨c=0)}",
                          [A, p, h](u64 c) {
                              if (c > (~u64{0} - 1) / 2) return false;
                              return A.test(2 * c + h) && (c == 0 || sym(p, c));
                          }};
            Term sub = image(p, Ah);
            if (term_empty(sub)) continue;
            parts.push_back(t_prepend({h}, t_subst(h ? SymbolMap::dpo() : SymbolMap::dbl(), sub)));
        }
        return t_union(std::move(parts));
    }
    SymbolPred fixed{"n∈" + A.desc + "∧n∉Sym[" + as + "]∧n not prime",
                     [A, a](u64 n) { return A.test(n) && !sym(a, n) && !is_prime(n); }};
    auto member = [A, a](u64 i) -> Term {
        Ordinal b = stage_below(a, i);
        u64 p = en::prime(i);
        SymbolPred Ai{"{k:" + std::to_string(p) + "^(k+1)∈" + A.desc + "∧(k∈Sym[" + ord_format(b) + "]∨k=0)}",
                      [A, b, p](u64 k) {
                          auto v = pow_checked(p, k + 1);
                          return v && A.test(*v) && (k == 0 || sym(b, k));
                      }};
        Term sub = image(b, Ai);
        return term_empty(sub) ? t_empty() : t_subst(SymbolMap::prime_pow(i), sub);
    };
    std::string desc = "Subst(PrimePow(i),SwitchImage[" + as + "_i](" + A.desc + "))";
    return t_union({nonempty(t_base_where(fixed)), t_prime_union(desc, member)});
}

}  // namespace

Ordinal default_switch_cap() { return Ordinal::omega() * Ordinal(3); }

bool SwitchPair::in_sym(u64 n) const { return sym(alpha, n); }
std::size_t SwitchPair::length(u64 n) const {
    if (!in_sym(n)) throw TermError("symbol " + std::to_string(n) + " starts no generator of " + str());
    return len(alpha, n);
}
std::vector<u64> SwitchPair::s_word(u64 n) const { return std::vector<u64>(length(n), n); }
std::vector<u64> SwitchPair::t_word(u64 n) const {
    if (!in_sym(n)) throw TermError("symbol " + std::to_string(n) + " starts no generator of " + str());
    return tword(alpha, n);
}
u64 SwitchPair::symbol(u64 j) const { return gen_symbol(alpha, j); }

Branch SwitchPair::apply(const Branch& x) const {
    u64 n = x.at(0);
    if (in_sym(n)) {
        auto s = s_word(n);
        if (has_prefix(x, s)) return branch_concat(t_word(n), drop(x, s.size()));
    }
    Acc acc = [&x](std::size_t i) -> std::optional<u64> { return x.at(i); };
    auto m = t_candidate(alpha, acc);
    if (m && in_sym(*m)) {
        auto t = t_word(*m);
        if (has_prefix(x, t)) return branch_concat(s_word(*m), drop(x, t.size()));
    }
    return x;
}

std::string SwitchPair::str() const { return "switch[" + ord_format(alpha) + "]"; }

SwitchPair switch_pair(const Ordinal& alpha, const Ordinal& cap) {
    if (alpha < kTwo) throw TermError("switch stage must be at least 2");
    if (!(alpha < cap)) throw TermError("switch stage " + ord_format(alpha) + " not below cap " + ord_format(cap));
    return SwitchPair{alpha};
}

Term switch_image_term(const SwitchPair& pair, const SymbolPred& A) { return image(pair.alpha, A); }

Homeo switch_homeo(const SwitchPair& pair) {
    Homeo h;
    h.kind = HomeoKind::Switch;
    h.alpha = pair.alpha;
    h.fwd = [pair](const Branch& b) { return pair.apply(b); };
    h.inv = h.fwd;
    h.name = "f_" + ord_format(pair.alpha);
    return h;
}

}  // namespace cbr
