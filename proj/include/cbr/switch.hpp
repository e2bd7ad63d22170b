#pragma once

#include <string>
#include <vector>

#include "cbr/branch.hpp"
#include "cbr/ordinal.hpp"

namespace cbr {

// The compatible prefix families S_α = {s_j}, T_α = {t_j} of the switch gallery.
// Every s_j is a constant word n^L; generators are addressed by that symbol n.
struct SwitchPair {
    Ordinal alpha;

    bool in_sym(u64 n) const;            // n = s_j(0) for some j
    std::size_t length(u64 n) const;     // |s_j| = |t_j|
    std::vector<u64> s_word(u64 n) const;
    std::vector<u64> t_word(u64 n) const;

    u64 symbol(u64 j) const;             // s_j(0) for the j-th generator
    std::vector<u64> s(u64 j) const { return s_word(symbol(j)); }
    std::vector<u64> t(u64 j) const { return t_word(symbol(j)); }

    // the induced switch map; an involution
    Branch apply(const Branch& x) const;
    std::string str() const;
};

Ordinal default_switch_cap();  // ω·3

SwitchPair switch_pair(const Ordinal& alpha, const Ordinal& cap = default_switch_cap());

// term for f_α({n̄ : A(n)})
Term switch_image_term(const SwitchPair& pair, const SymbolPred& A);

Homeo switch_homeo(const SwitchPair& pair);

}  // namespace cbr
