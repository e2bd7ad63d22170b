#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbr/spaces.hpp"

namespace cbr {

class TermError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Injective map ω -> ω with decidable range.
struct SymbolMap {
    enum Kind { Double, DoublePlusOne, PrimePow, Compose } kind = Double;
    u64 i = 0;                     // PrimePow: n -> p_i^(n+1)
    std::vector<SymbolMap> parts;  // Compose: applied first to last

    static SymbolMap dbl() { return {Double, 0, {}}; }
    static SymbolMap dpo() { return {DoublePlusOne, 0, {}}; }
    static SymbolMap prime_pow(u64 i) { return {PrimePow, i, {}}; }
    static SymbolMap compose(std::vector<SymbolMap> parts) { return {Compose, 0, std::move(parts)}; }

    std::optional<u64> apply(u64 n) const;   // nullopt on overflow
    std::optional<u64> invert(u64 m) const;  // nullopt outside the range
    std::string str() const;
};

std::optional<Branch> map_branch(const SymbolMap& m, const Branch& b);
std::optional<Branch> unmap_branch(const SymbolMap& m, const Branch& b);
Branch branch_tail(const Branch& b);  // drop the first symbol
Branch branch_cons(u64 s, const Branch& b);
Branch branch_concat(const std::vector<u64>& w, const Branch& b);

struct SymbolPred {
    std::string desc;
    std::function<bool(u64)> test;
};

SymbolPred pred_all();
SymbolPred pred_none();

// BaseWhere predicates are inspected on [0, kPredScan).
inline constexpr u64 kPredScan = 4096;
// number of matches in [0, kPredScan), stopping at `cap`
u64 pred_count(const SymbolPred& p, u64 cap);

struct BranchTermNode;
using Term = std::shared_ptr<const BranchTermNode>;

struct BranchTermNode {
    enum Kind { Empty, Base, BaseWhere, Single, Prepend, Subst, DupHead, UnionFin, IndexedPrimeUnion } kind = Empty;
    SymbolPred pred;                   // BaseWhere
    Branch branch;                     // Single
    std::vector<u64> word;             // Prepend (nonempty)
    SymbolMap map;                     // Subst
    Term inner;                        // Prepend, Subst, DupHead
    std::vector<Term> parts;           // UnionFin
    std::function<Term(u64)> member;   // IndexedPrimeUnion: residual below symbol p_i
    std::string member_desc;
};

Term t_empty();
Term t_base();
Term t_base_where(SymbolPred p);
Term t_single(Branch b);
Term t_prepend(std::vector<u64> w, Term t);
Term t_subst(SymbolMap m, Term t);
Term t_dup_head(Term t);
Term t_union(std::vector<Term> parts);
// ⋃_i (p_i)⌢member(i); member(i) is assumed uniform in i
Term t_prime_union(std::string desc, std::function<Term(u64)> member);

std::string term_str(const Term& t);
bool term_empty(const Term& t);
// {z : symbol⌢z ∈ t}, nullptr when no branch starts with symbol
Term subtree(const Term& t, u64 symbol);
Term residual(const Term& t, const std::vector<u64>& prefix);
bool term_contains(const Term& t, const Branch& b);
// sample of branches: Base symbols and family indices below `bound`
std::vector<Branch> term_branches(const Term& t, u64 bound);
// up to `limit` distinct first symbols of branches of t
std::vector<u64> root_symbols(const Term& t, std::size_t limit);
// longest w ⊒ prefix, |w| <= len, with every branch through prefix extending w
std::vector<u64> forced_extension(const Term& t, const std::vector<u64>& prefix, std::size_t len);

// bijective enumeration of the branches (unions assumed disjoint)
std::optional<Branch> term_point(const Term& t, u64 i);
std::optional<u64> term_index(const Term& t, const Branch& b);

// the branches of t as a countable ultrametric space
SpacePtr ultra_table(Term t, std::string description = "");

}  // namespace cbr
