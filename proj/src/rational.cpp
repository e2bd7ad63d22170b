#include "cbr/rational.hpp"

#include <cctype>

namespace cbr {

Rational::Rational(long num, long den) {
    if (den == 0) throw RationalError("zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (sgn(o.v_) == 0) throw RationalError("division by zero");
    v_ /= o.v_;
    return *this;
}

Rational Rational::parse(std::string_view text) {
    std::string s(text);
    auto bad = [&] { return RationalError("invalid rational '" + s + "'"); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    auto digits = [&](std::string_view part, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !part.empty() && part[0] == '-') i = 1;
        if (i >= part.size()) return false;
        for (; i < part.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
        return true;
    };
    std::string_view sv(s);
    if (slash == std::string::npos) {
        if (!digits(sv, true)) throw bad();
        return Rational(mpq_class(mpz_class(s, 10)));
    }
    auto num = sv.substr(0, slash), den = sv.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false)) throw bad();
    mpz_class d(std::string(den), 10);
    if (d == 0) throw RationalError("zero denominator in '" + s + "'");
    return Rational(mpq_class(mpz_class(std::string(num), 10), d));
}

Rational Rational::pow2(long e) {
    mpz_class one = 1;
    mpz_class p;
    mpz_mul_2exp(p.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
    return e >= 0 ? Rational(mpq_class(p)) : Rational(mpq_class(one, p));
}

std::string Rational::str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

long floor_log2(const Rational& x) {
    if (x.sign() <= 0) throw RationalError("floor_log2 of non-positive value");
    const mpz_class& n = x.raw().get_num();
    const mpz_class& d = x.raw().get_den();
    long e = static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2)) - static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 2));
    // 2^e is within a factor 2 of x; adjust
    while (Rational::pow2(e) > x) --e;
    while (Rational::pow2(e + 1) <= x) ++e;
    return e;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

std::size_t RationalHash::operator()(const Rational& r) const {
    std::size_t h1 = std::hash<std::string>{}(r.raw().get_num().get_str(16));
    std::size_t h2 = std::hash<std::string>{}(r.raw().get_den().get_str(16));
    return h1 ^ (h2 * 0x9e3779b97f4a7c15ULL);
}

}  // namespace cbr
