#include <doctest.h>

#include <map>
#include <random>

#include "cbr/ordinal.hpp"
#include "ordinal_oracle.hpp"

using namespace cbr;
using namespace oracle;

namespace {

Ordinal P(const char* s) { return ord_parse(s); }

}  // namespace

TEST_CASE("comparison examples") {
    CHECK(ord_cmp(Ordinal::omega(), Ordinal::omega()) == Cmp::EQ);
    CHECK(ord_cmp(P("w*2+1"), P("w^2")) == Cmp::LT);
    CHECK(ord_cmp(P("w+3"), P("w+2")) == Cmp::GT);
}

TEST_CASE("addition examples") {
    CHECK(ord_add(Ordinal(1), Ordinal::omega()) == Ordinal::omega());
    CHECK(ord_format(ord_add(Ordinal::omega(), Ordinal(1))) == "w+1");
    CHECK(ord_add(P("w*2+1"), P("w")) == P("w*3"));
}

TEST_CASE("multiplication examples") {
    CHECK(ord_mul(P("w"), Ordinal(3)) == P("w*3"));
    CHECK(ord_mul(Ordinal(2), P("w")) == P("w"));
    CHECK(ord_mul(P("w+2"), P("w")) == P("w^2"));
    CHECK(ord_mul(P("w+1"), P("w+1")) == P("w^2+w+1"));
}

TEST_CASE("successor and limit") {
    CHECK(is_limit(P("w*2")));
    CHECK(is_successor(P("w+1")));
    CHECK(ord_succ(Ordinal()) == Ordinal(1));
    CHECK_FALSE(is_limit(Ordinal()));
    CHECK_FALSE(is_successor(Ordinal()));
    CHECK(ord_pred(P("w^2+3")) == P("w^2+2"));
    CHECK_THROWS_AS(ord_pred(P("w")), OrdinalError);
}

TEST_CASE("fundamental sequences") {
    CHECK(fundamental_seq(P("w"), 3) == Ordinal(4));
    CHECK(fundamental_seq(P("w*2"), 3) == P("w+4"));
    CHECK(fundamental_seq(P("w^2"), 2) == P("w*3"));
    CHECK(fundamental_seq(P("w^w"), 2) == P("w^3"));
    CHECK_THROWS_AS(fundamental_seq(P("w+1"), 0), OrdinalError);
    for (const char* l : {"w", "w*2", "w^2", "w^2+w", "w^3*2", "w^w", "w^(w+1)", "w^(w*2)"}) {
        Ordinal lam = P(l);
        for (std::uint64_t i = 0; i < 6; ++i) {
            CHECK(fundamental_seq(lam, i) < fundamental_seq(lam, i + 1));
            CHECK(fundamental_seq(lam, i + 1) < lam);
        }
    }
}

TEST_CASE("parse and format round trip") {
    CHECK(ord_format(P("w*2+1")) == "w*2+1");
    CHECK(P("w^2") == Ordinal::power(Ordinal(2)));
    CHECK(P("0").is_zero());
    for (const char* s : {"0", "7", "w", "w+1", "w*3+2", "w^2*4+w+9", "w^w", "w^(w+1)*2+w^w+3", "w^(w^2)"})
        CHECK(ord_format(P(s)) == s);
    CHECK_THROWS_AS(P("w*"), OrdinalError);
    CHECK_THROWS_AS(P(""), OrdinalError);
    CHECK_THROWS_AS(P("w^(2"), OrdinalError);
    CHECK_THROWS_AS(P("3x"), OrdinalError);
    CHECK_THROWS_AS(P("w*0"), OrdinalError);
}

TEST_CASE("depth cap") {
    int old = ordinal_depth_cap();
    set_ordinal_depth_cap(3);
    CHECK_NOTHROW(P("w^w"));
    CHECK_THROWS_AS(P("w^(w^w)"), OrdinalError);
    set_ordinal_depth_cap(old);
    CHECK_NOTHROW(P("w^(w^w)"));
}

TEST_CASE("oracle agreement below w^3, coefficients up to 5") {
    std::size_t pairs = 0;
    for (unsigned a = 0; a < 216; ++a) {
        unsigned ai = a / 36, aj = a / 6 % 6, ak = a % 6;
        Blocks ab = blocks_of(ai, aj, ak);
        Ordinal x = triple(ai, aj, ak);
        CHECK(x == ord_add(ord_add(Ordinal::power(Ordinal(2), ai), Ordinal::power(Ordinal(1), aj)), Ordinal(ak)));
        for (unsigned b = 0; b < 216; ++b) {
            unsigned bi = b / 36, bj = b / 6 % 6, bk = b % 6;
            Blocks bb = blocks_of(bi, bj, bk);
            Ordinal y = triple(bi, bj, bk);
            Blocks cat = ab;
            cat.insert(cat.end(), bb.begin(), bb.end());
            REQUIRE(ord_add(x, y) == from_type(order_type(cat)));
            REQUIRE(ord_mul(x, y) == from_type(order_type(mul_blocks(ab, bb))));
            bool lex_lt = std::tie(ai, aj, ak) < std::tie(bi, bj, bk);
            REQUIRE((ord_cmp(x, y) == Cmp::LT) == lex_lt);
            ++pairs;
        }
    }
    CHECK(pairs >= 10000);
}

TEST_CASE("algebraic laws on random small ordinals") {
    std::mt19937 rng(7);
    auto rnd = [&] {
        std::uniform_int_distribution<unsigned> d(0, 3);
        Ordinal o;
        for (int e = 3; e >= 0; --e) o = ord_add(o, Ordinal::power(Ordinal(e), d(rng)));
        return o;
    };
    for (int n = 0; n < 400; ++n) {
        Ordinal a = rnd(), b = rnd(), c = rnd();
        CHECK(ord_add(ord_add(a, b), c) == ord_add(a, ord_add(b, c)));
        CHECK(ord_mul(ord_mul(a, b), c) == ord_mul(a, ord_mul(b, c)));
        CHECK(ord_mul(a, ord_add(b, c)) == ord_add(ord_mul(a, b), ord_mul(a, c)));
        if (b < c) CHECK(ord_add(a, b) < ord_add(a, c));
        Cmp ab = ord_cmp(a, b), ba = ord_cmp(b, a);
        CHECK((ab == Cmp::LT) == (ba == Cmp::GT));
        CHECK((ab == Cmp::EQ) == (ba == Cmp::EQ));
    }
}
