#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cbr/rational.hpp"

namespace cbr::enumeration {

// Cantor pairing; throws on overflow.
std::uint64_t pair(std::uint64_t a, std::uint64_t b);
std::pair<std::uint64_t, std::uint64_t> unpair(std::uint64_t z);

// Q ∩ [0,1] ordered by denominator then numerator: 0, 1, 1/2, 1/3, 2/3, 1/4, ...
Rational unit_rational(std::uint64_t i);
std::optional<std::uint64_t> unit_index(const Rational& x);

// Q ordered by height max(|p|, q), then by value.
Rational line_rational(std::uint64_t i);
std::uint64_t line_index(const Rational& x);

// Finite words over omega whose last symbol differs from `tail`, in a fixed bijection with N.
std::vector<std::uint64_t> word(std::uint64_t i, std::uint64_t tail);
std::optional<std::uint64_t> word_index(const std::vector<std::uint64_t>& w, std::uint64_t tail);

// i-th prime, p_0 = 2
std::uint64_t prime(std::uint64_t i);
// n = p_i^(e+1) -> (i, e)
std::optional<std::pair<std::uint64_t, std::uint64_t>> prime_power(std::uint64_t n);

}  // namespace cbr::enumeration
