#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cbr {

class OrdinalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CnfTerm;

// Countable ordinal below epsilon_0 in Cantor normal form.
// terms are (exponent, coefficient) with strictly decreasing exponents.
class Ordinal {
public:
    Ordinal() = default;
    explicit Ordinal(std::uint64_t n);

    static Ordinal omega();
    // omega^e * c
    static Ordinal power(const Ordinal& e, std::uint64_t c = 1);

    const std::vector<CnfTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_finite() const;
    // value of a finite ordinal; throws otherwise
    std::uint64_t finite_value() const;
    int depth() const;

    // leading exponent (0 for the zero ordinal)
    Ordinal degree() const;

    bool operator==(const Ordinal& o) const;
    std::strong_ordering operator<=>(const Ordinal& o) const;

private:
    friend Ordinal make_ordinal(std::vector<CnfTerm> terms);
    std::vector<CnfTerm> terms_;
};

struct CnfTerm {
    Ordinal exp;
    std::uint64_t coef = 1;
};

enum class Cmp { LT, EQ, GT };

// Nesting cap; depth(0)=0, depth(w^e*c+...) = 1 + max depth(e).
int ordinal_depth_cap();
void set_ordinal_depth_cap(int cap);

Ordinal make_ordinal(std::vector<CnfTerm> terms);

Cmp ord_cmp(const Ordinal& a, const Ordinal& b);
Ordinal ord_add(const Ordinal& a, const Ordinal& b);
Ordinal ord_mul(const Ordinal& a, const Ordinal& b);
Ordinal ord_succ(const Ordinal& a);
bool is_limit(const Ordinal& a);
bool is_successor(const Ordinal& a);
// a = b + 1 -> b; throws unless successor
Ordinal ord_pred(const Ordinal& a);

// Canonical fundamental sequence: ...+w^(g+1) -> ...+w^g*(i+1); ...+w^l -> ...+w^(l[i]).
Ordinal fundamental_seq(const Ordinal& lambda, std::uint64_t i);

Ordinal ord_parse(std::string_view text);
std::string ord_format(const Ordinal& a);

inline Ordinal operator+(const Ordinal& a, const Ordinal& b) { return ord_add(a, b); }
inline Ordinal operator*(const Ordinal& a, const Ordinal& b) { return ord_mul(a, b); }

std::ostream& operator<<(std::ostream& os, const Ordinal& a);

}  // namespace cbr
