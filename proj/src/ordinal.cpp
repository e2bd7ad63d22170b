#include "cbr/ordinal.hpp"

#include <atomic>
#include <cctype>
#include <limits>
#include <ostream>

namespace cbr {

namespace {

std::atomic<int> g_depth_cap{8};

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b)
        throw OrdinalError("coefficient overflow");
    return a + b;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        throw OrdinalError("coefficient overflow");
    return a * b;
}

Ordinal capped(Ordinal o) {
    if (o.depth() > g_depth_cap.load())
        throw OrdinalError("ordinal nesting depth cap exceeded");
    return o;
}

}  // namespace

int ordinal_depth_cap() { return g_depth_cap.load(); }
void set_ordinal_depth_cap(int cap) {
    if (cap < 1) throw OrdinalError("depth cap must be positive");
    g_depth_cap.store(cap);
}

Ordinal make_ordinal(std::vector<CnfTerm> terms) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].coef == 0) throw OrdinalError("zero coefficient in CNF");
        if (i > 0 && !(terms[i].exp < terms[i - 1].exp))
            throw OrdinalError("exponents not strictly decreasing");
    }
    Ordinal o;
    o.terms_ = std::move(terms);
    return capped(std::move(o));
}

Ordinal::Ordinal(std::uint64_t n) {
    if (n > 0) terms_.push_back(CnfTerm{Ordinal(), n});
}

Ordinal Ordinal::omega() { return power(Ordinal(1)); }

Ordinal Ordinal::power(const Ordinal& e, std::uint64_t c) {
    if (c == 0) return Ordinal();
    return make_ordinal({CnfTerm{e, c}});
}

bool Ordinal::is_finite() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exp.is_zero()); }

std::uint64_t Ordinal::finite_value() const {
    if (!is_finite()) throw OrdinalError("ordinal is not finite");
    return terms_.empty() ? 0 : terms_[0].coef;
}

int Ordinal::depth() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, 1 + t.exp.depth());
    return d;
}

Ordinal Ordinal::degree() const { return terms_.empty() ? Ordinal() : terms_[0].exp; }

bool Ordinal::operator==(const Ordinal& o) const { return ord_cmp(*this, o) == Cmp::EQ; }

std::strong_ordering Ordinal::operator<=>(const Ordinal& o) const {
    switch (ord_cmp(*this, o)) {
        case Cmp::LT: return std::strong_ordering::less;
        case Cmp::GT: return std::strong_ordering::greater;
        default: return std::strong_ordering::equal;
    }
}

Cmp ord_cmp(const Ordinal& a, const Ordinal& b) {
    const auto& x = a.terms();
    const auto& y = b.terms();
    std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i) {
        Cmp c = ord_cmp(x[i].exp, y[i].exp);
        if (c != Cmp::EQ) return c;
        if (x[i].coef != y[i].coef) return x[i].coef < y[i].coef ? Cmp::LT : Cmp::GT;
    }
    if (x.size() == y.size()) return Cmp::EQ;
    return x.size() < y.size() ? Cmp::LT : Cmp::GT;
}

Ordinal ord_add(const Ordinal& a, const Ordinal& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return b;
    const Ordinal& lead = b.terms()[0].exp;
    std::vector<CnfTerm> out;
    std::uint64_t carry = 0;
    for (const auto& t : a.terms()) {
        Cmp c = ord_cmp(t.exp, lead);
        if (c == Cmp::GT) out.push_back(t);
        else if (c == Cmp::EQ) carry = t.coef;
        else break;
    }
    bool first = true;
    for (const auto& t : b.terms()) {
        CnfTerm nt = t;
        if (first) nt.coef = checked_add(nt.coef, carry);
        first = false;
        out.push_back(std::move(nt));
    }
    return make_ordinal(std::move(out));
}

Ordinal ord_mul(const Ordinal& a, const Ordinal& b) {
    if (a.is_zero() || b.is_zero()) return Ordinal();
    const auto& at = a.terms();
    Ordinal acc;
    for (const auto& t : b.terms()) {
        Ordinal piece;
        if (t.exp.is_zero()) {
            std::vector<CnfTerm> v = at;
            v[0].coef = checked_mul(v[0].coef, t.coef);
            piece = make_ordinal(std::move(v));
        } else {
            piece = Ordinal::power(ord_add(at[0].exp, t.exp), t.coef);
        }
        acc = ord_add(acc, piece);
    }
    return acc;
}

Ordinal ord_succ(const Ordinal& a) { return ord_add(a, Ordinal(1)); }

bool is_limit(const Ordinal& a) { return !a.is_zero() && !a.terms().back().exp.is_zero(); }

bool is_successor(const Ordinal& a) { return !a.is_zero() && a.terms().back().exp.is_zero(); }

Ordinal ord_pred(const Ordinal& a) {
    if (!is_successor(a)) throw OrdinalError("ordinal is not a successor");
    std::vector<CnfTerm> v = a.terms();
    if (--v.back().coef == 0) v.pop_back();
    return make_ordinal(std::move(v));
}

Ordinal fundamental_seq(const Ordinal& lambda, std::uint64_t i) {
    if (!is_limit(lambda)) throw OrdinalError("fundamental sequence requested for non-limit " + ord_format(lambda));
    std::vector<CnfTerm> v = lambda.terms();
    CnfTerm last = v.back();
    if (--v.back().coef == 0) v.pop_back();
    Ordinal base = make_ordinal(std::move(v));
    Ordinal tail;
    if (is_successor(last.exp))
        tail = Ordinal::power(ord_pred(last.exp), checked_add(i, 1));
    else
        tail = Ordinal::power(fundamental_seq(last.exp, i));
    return ord_add(base, tail);
}

namespace {

struct Parser {
    std::string_view s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw OrdinalError("malformed ordinal '" + std::string(s) + "' at " + std::to_string(pos) + ": " + what);
    }
    bool peek(char c) const { return pos < s.size() && s[pos] == c; }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++pos;
        return true;
    }
    std::uint64_t nat() {
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected digit");
        if (s[pos] == '0' && pos + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[pos + 1])))
            fail("leading zero");
        std::uint64_t v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            v = checked_add(checked_mul(v, 10), static_cast<std::uint64_t>(s[pos] - '0'));
            ++pos;
        }
        return v;
    }
    Ordinal atom() {
        if (eat('(')) {
            Ordinal o = sum();
            if (!eat(')')) fail("expected ')'");
            return o;
        }
        if (eat('w')) return Ordinal::omega();
        return Ordinal(nat());
    }
    Ordinal term() {
        if (eat('w')) {
            Ordinal e(1);
            if (eat('^')) e = atom();
            std::uint64_t c = 1;
            if (eat('*')) {
                c = nat();
                if (c == 0) fail("zero coefficient");
            }
            return Ordinal::power(e, c);
        }
        return Ordinal(nat());
    }
    Ordinal sum() {
        Ordinal o = term();
        while (eat('+')) o = ord_add(o, term());
        return o;
    }
};

std::string format_exp(const Ordinal& e) {
    if (e.is_finite()) return std::to_string(e.finite_value());
    if (e == Ordinal::omega()) return "w";
    return "(" + ord_format(e) + ")";
}

}  // namespace

Ordinal ord_parse(std::string_view text) {
    std::string compact;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
    if (compact.empty()) throw OrdinalError("empty ordinal text");
    Parser p{compact};
    Ordinal o = p.sum();
    if (p.pos != compact.size()) p.fail("trailing characters");
    return o;
}

std::string ord_format(const Ordinal& a) {
    if (a.is_zero()) return "0";
    std::string out;
    for (const auto& t : a.terms()) {
        if (!out.empty()) out += "+";
        if (t.exp.is_zero()) {
            out += std::to_string(t.coef);
            continue;
        }
        out += "w";
        if (!(t.exp == Ordinal(1))) out += "^" + format_exp(t.exp);
        if (t.coef > 1) out += "*" + std::to_string(t.coef);
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const Ordinal& a) { return os << ord_format(a); }

}  // namespace cbr
