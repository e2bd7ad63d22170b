#include "cbr/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace cbr::enumeration {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

std::mutex g_mu;
std::vector<u64> g_phi_prefix{0, 1};  // S(n) = sum_{k<=n} phi(k)
std::vector<u64> g_primes;

void grow_phi(u64 n) {
    if (g_phi_prefix.size() > n) return;
    u64 m = std::max<u64>(n + 1, g_phi_prefix.size() * 2);
    std::vector<u64> phi(m);
    std::iota(phi.begin(), phi.end(), u64{0});
    for (u64 i = 2; i < m; ++i)
        if (phi[i] == i)
            for (u64 j = i; j < m; j += i) phi[j] -= phi[j] / i;
    std::vector<u64> pre(m);
    pre[0] = 0;
    for (u64 i = 1; i < m; ++i) pre[i] = pre[i - 1] + phi[i];
    g_phi_prefix.swap(pre);
}

u64 phi_sum(u64 n) {
    std::lock_guard<std::mutex> lk(g_mu);
    grow_phi(n);
    return g_phi_prefix[n];
}

u64 totient(u64 n) { return n == 0 ? 0 : phi_sum(n) - phi_sum(n - 1); }

std::vector<u64> distinct_primes(u64 n) {
    std::vector<u64> ps;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        ps.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

// #{1 <= k <= n : gcd(k, h) = 1}
u64 coprime_upto(u64 n, u64 h) {
    auto ps = distinct_primes(h);
    long long total = 0;
    std::size_t m = ps.size();
    for (u64 mask = 0; mask < (u64{1} << m); ++mask) {
        u64 d = 1;
        int bits = 0;
        for (std::size_t j = 0; j < m; ++j)
            if (mask >> j & 1) { d *= ps[j]; ++bits; }
        long long c = static_cast<long long>(n / d);
        total += (bits % 2) ? -c : c;
    }
    return static_cast<u64>(total);
}

// j-th (0-based) k >= 1 with gcd(k, h) = 1
u64 nth_coprime(u64 j, u64 h) {
    for (u64 k = 1;; ++k)
        if (std::gcd(k, h) == 1 && j-- == 0) return k;
}

u64 to_u64(const mpz_class& z) {
    if (sgn(z) < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 63) throw std::overflow_error("value too large for index");
    return static_cast<u64>(z.get_ui());
}

u64 add_chk(u64 a, u64 b) {
    if (a > ~u64{0} - b) throw std::overflow_error("index overflow");
    return a + b;
}

}  // namespace

u64 pair(u64 a, u64 b) {
    u128 s = static_cast<u128>(a) + b;
    u128 z = s * (s + 1) / 2 + b;
    if (z > ~u64{0}) throw std::overflow_error("pairing overflow");
    return static_cast<u64>(z);
}

std::pair<u64, u64> unpair(u64 z) {
    u64 w = static_cast<u64>((std::sqrt(8.0L * static_cast<long double>(z) + 1) - 1) / 2);
    auto tri = [](u64 x) { return static_cast<u128>(x) * (x + 1) / 2; };
    while (tri(w) > z) --w;
    while (tri(w + 1) <= z) ++w;
    u64 b = z - static_cast<u64>(tri(w));
    return {w - b, b};
}

Rational unit_rational(u64 i) {
    if (i == 0) return Rational(0);
    if (i == 1) return Rational(1);
    // base(q) = 1 + S(q-1)
    u64 q = 2;
    while (1 + phi_sum(q) <= i) q = q < 64 ? q + 1 : q + q / 2;
    u64 lo = 2, hi = q;
    while (lo < hi) {
        u64 mid = (lo + hi + 1) / 2;
        if (1 + phi_sum(mid - 1) <= i) lo = mid; else hi = mid - 1;
    }
    q = lo;
    u64 p = nth_coprime(i - (1 + phi_sum(q - 1)), q);
    return Rational(mpq_class(mpz_class(static_cast<unsigned long>(p)), mpz_class(static_cast<unsigned long>(q))));
}

std::optional<u64> unit_index(const Rational& x) {
    if (x < Rational(0) || x > Rational(1)) return std::nullopt;
    if (x == Rational(0)) return 0;
    if (x == Rational(1)) return 1;
    u64 p = to_u64(x.raw().get_num()), q = to_u64(x.raw().get_den());
    return add_chk(1 + phi_sum(q - 1), coprime_upto(p - 1, q));
}

u64 line_index(const Rational& x) {
    const mpz_class& num = x.raw().get_num();
    u64 Q = to_u64(x.raw().get_den());
    u64 P = to_u64(mpz_class(abs(num)));
    bool neg = sgn(num) < 0;
    u64 h = std::max(P, Q);
    if (h == 1) return neg ? 0 : (P == 0 ? 1 : 2);
    u64 base = 3 + 4 * (phi_sum(h - 1) - 1);
    u64 f = totient(h);
    if (Q == h) {
        u64 r = neg ? f - coprime_upto(P, h) : f + coprime_upto(P - 1, h);
        return add_chk(base, f + r);
    }
    if (neg) return add_chk(base, coprime_upto(Q - 1, h));
    return add_chk(base, 3 * f + (f - coprime_upto(Q, h)));
}

Rational line_rational(u64 i) {
    if (i < 3) return Rational(static_cast<long>(i) - 1);
    u64 h = 2;
    while (3 + 4 * (phi_sum(h) - 1) <= i) h = h < 64 ? h + 1 : h + h / 2;
    u64 lo = 2, hi = h;
    while (lo < hi) {
        u64 mid = (lo + hi + 1) / 2;
        if (3 + 4 * (phi_sum(mid - 1) - 1) <= i) lo = mid; else hi = mid - 1;
    }
    h = lo;
    u64 off = i - (3 + 4 * (phi_sum(h - 1) - 1));
    u64 f = totient(h);
    auto mk = [](long long p, u64 q) {
        return Rational(mpq_class(mpz_class(static_cast<long>(p)), mpz_class(static_cast<unsigned long>(q))));
    };
    long long H = static_cast<long long>(h);
    if (off < f) return mk(-H, nth_coprime(off, h));
    if (off < 2 * f) return mk(-static_cast<long long>(nth_coprime(2 * f - 1 - off, h)), h);
    if (off < 3 * f) return mk(static_cast<long long>(nth_coprime(off - 2 * f, h)), h);
    return mk(H, nth_coprime(4 * f - 1 - off, h));
}

std::vector<u64> word(u64 i, u64 tail) {
    std::vector<u64> w;
    while (i > 0) {
        auto [h, r] = unpair(i - 1);
        if (r == 0) {
            w.push_back(h < tail ? h : h + 1);
            break;
        }
        w.push_back(h);
        i = r;
    }
    return w;
}

std::optional<u64> word_index(const std::vector<u64>& w, u64 tail) {
    if (w.empty()) return 0;
    if (w.back() == tail) return std::nullopt;
    u64 last = w.back();
    u64 idx = pair(last < tail ? last : last - 1, 0) + 1;
    for (std::size_t k = w.size() - 1; k-- > 0;) idx = add_chk(pair(w[k], idx), 1);
    return idx;
}

u64 prime(u64 i) {
    std::lock_guard<std::mutex> lk(g_mu);
    if (g_primes.empty()) g_primes.push_back(2);
    for (u64 c = g_primes.back() + 1; g_primes.size() <= i; ++c) {
        bool is_p = true;
        for (u64 p : g_primes) {
            if (p * p > c) break;
            if (c % p == 0) { is_p = false; break; }
        }
        if (is_p) g_primes.push_back(c);
    }
    return g_primes[i];
}

std::optional<std::pair<u64, u64>> prime_power(u64 n) {
    if (n < 2) return std::nullopt;
    u64 p = 0;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) { p = d; break; }
    if (p == 0) p = n;
    u64 e = 0;
    while (n % p == 0) { n /= p; ++e; }
    if (n != 1) return std::nullopt;
    u64 idx = 0;
    while (prime(idx) < p) ++idx;
    return std::make_pair(idx, e - 1);
}

}  // namespace cbr::enumeration
