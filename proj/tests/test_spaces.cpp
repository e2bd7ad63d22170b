#include <doctest.h>

#include <random>
#include <set>

#include "cbr/enumeration.hpp"
#include "cbr/spaces.hpp"

using namespace cbr;
namespace en = cbr::enumeration;

namespace {

Rational R(const char* s) { return Rational::parse(s); }

Presentation unit_paper() { return make_presentation(unit_interval(), Schedule::DyadicPaper); }

// index of a given point in the presentation's dense sequence
u64 idx(const Presentation& p, const Point& x) {
    auto i = dense_index(p, x);
    REQUIRE(i.has_value());
    return *i;
}

// membership of q in the open / closed ball, straight from the metric
bool in_ball(const Presentation& p, const Point& c, std::uint32_t level, const Point& q, bool closed) {
    Rational d = p.transport ? distance(*p.space, p.transport->apply(c), p.transport->apply(q)) : distance(*p.space, c, q);
    Rational r = radius(p, level);
    return closed ? d <= r : d < r;
}

}  // namespace

TEST_CASE("rational basics") {
    CHECK(R("2/4") == Rational(1, 2));
    CHECK(R("-3") == Rational(-3));
    CHECK_THROWS_AS(R("1/0"), RationalError);
    CHECK_THROWS_AS(R("x"), RationalError);
    CHECK(Rational::pow2(-3) == Rational(1, 8));
    CHECK(floor_log2(Rational(3, 8)) == -2);
    CHECK(R("7/3").str() == "7/3");
    CHECK_THROWS_AS(Rational(1) / Rational(0), RationalError);
}

TEST_CASE("enumerations are bijective on prefixes") {
    std::set<Rational> seen;
    for (u64 i = 0; i < 3000; ++i) {
        Rational q = en::unit_rational(i);
        CHECK(q >= Rational(0));
        CHECK(q <= Rational(1));
        CHECK(seen.insert(q).second);
        CHECK(en::unit_index(q) == i);
    }
    seen.clear();
    for (u64 i = 0; i < 3000; ++i) {
        Rational q = en::line_rational(i);
        CHECK(seen.insert(q).second);
        CHECK(en::line_index(q) == i);
    }
    for (u64 tail : {0, 1}) {
        std::set<std::vector<u64>> words;
        for (u64 i = 0; i < 3000; ++i) {
            auto w = en::word(i, tail);
            CHECK((w.empty() || w.back() != tail));
            CHECK(words.insert(w).second);
            CHECK(en::word_index(w, tail) == i);
        }
    }
    for (u64 z = 0; z < 2000; ++z) {
        auto [a, b] = en::unpair(z);
        CHECK(en::pair(a, b) == z);
    }
    CHECK(en::prime(0) == 2);
    CHECK(en::prime(4) == 11);
    CHECK(en::prime_power(8) == std::make_pair(u64{0}, u64{2}));
    CHECK(en::prime_power(25) == std::make_pair(u64{2}, u64{1}));
    CHECK_FALSE(en::prime_power(12).has_value());
    CHECK_FALSE(en::prime_power(1).has_value());
}

TEST_CASE("branches") {
    auto b = Branch::make({0, 1, 2, 2}, 2);
    CHECK(b.word == std::vector<u64>{0, 1});
    CHECK(b.str() == "<0,1|2>");
    CHECK(Branch::parse("<0,1|2>") == b);
    CHECK(Branch::parse("<|3>") == Branch::constant(3));
    CHECK_THROWS_AS(Branch::parse("<0,|1>"), SpaceError);
    CHECK(b.prefix(4) == std::vector<u64>{0, 1, 2, 2});
}

TEST_CASE("dist examples") {
    auto fin = make_presentation(finite_space({"a", "b"}, {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}),
                                 Schedule::DyadicPaper);
    CHECK(dist(fin, 0, 1) == Rational(1));

    auto hh = hedgehog();
    CHECK(distance(*hh, hedge_point(0, R("1/2")), hedge_point(1, R("1/3"))) == R("5/6"));
    CHECK(distance(*hh, hedge_point(2, R("1/2")), hedge_point(2, R("1/3"))) == R("1/6"));
    CHECK(distance(*hh, hedge_point(0, Rational(0)), hedge_point(4, R("1/3"))) == R("1/3"));

    auto baire = make_presentation(baire_space(), Schedule::AlignedUltra);
    u64 i = idx(baire, branch_point(Branch::constant(0)));
    u64 j = idx(baire, branch_point(Branch::make({0, 1}, 0)));
    CHECK(dist(baire, i, j) == R("1/4"));

    auto sc = make_presentation(scaled(R("1/2"), unit_interval()), Schedule::DyadicPaper);
    auto un = unit_paper();
    for (u64 a = 0; a < 10; ++a)
        for (u64 c = 0; c < 10; ++c) CHECK(dist(sc, a, c) == dist(un, a, c) / Rational(2));

    AmalgamPart p0{unit_interval(), Rational(0), R("1/2")};
    AmalgamPart p1{unit_interval(), Rational(1), R("1/3")};
    auto am = amalgam({p0, p1});
    CHECK(distance(*am, sum_point(0, line_point(R("1/4"))), sum_point(1, line_point(R("1/2")))) ==
          R("1/4") + R("1/2") + R("1/3") + R("1/2"));
}

TEST_CASE("ball_strictly_below examples") {
    auto baire = make_presentation(baire_space(), Schedule::AlignedUltra);
    u64 z = idx(baire, branch_point(Branch::constant(0)));
    CHECK(ball_strictly_below(baire, {z, 1}, {z, 2}));
    CHECK_FALSE(ball_strictly_below(baire, {z, 2}, {z, 1}));

    auto fin = make_presentation(finite_space({"a", "b"}, {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}),
                                 Schedule::DyadicPaper);
    CHECK(ball_strictly_below(fin, {0, 0}, {0, 1}));

    auto un = unit_paper();
    u64 half = idx(un, line_point(R("1/2")));
    u64 zero = idx(un, line_point(Rational(0)));
    CHECK_FALSE(ball_strictly_below(un, {half, 1}, {zero, 1}));
    CHECK(ball_strictly_below(un, {half, 1}, {half, 2}));
    // [1/2 - 1/4, 1/2 + 1/4] sits in (0, 1) but B(1/2, 1/2) = (0,1]∩... : closed(m) = [1/4,3/4] ⊂ open(n) = (0,1)
    CHECK(ball_strictly_below(un, {half, 0}, {half, 1}));
}

TEST_CASE("ball_apart examples") {
    auto baire = make_presentation(baire_space(), Schedule::AlignedUltra);
    u64 a = idx(baire, branch_point(Branch::constant(0)));
    u64 b = idx(baire, branch_point(Branch::make({1}, 0)));
    CHECK(ball_apart(baire, {a, 1}, {b, 1}));
    CHECK_FALSE(ball_apart(baire, {a, 0}, {b, 1}));

    // closed balls [0,1/4] and [1/8,3/8]
    auto un = unit_paper();
    u64 zero = idx(un, line_point(Rational(0)));
    u64 q = idx(un, line_point(R("1/4")));
    CHECK_FALSE(ball_apart(un, {zero, 1}, {q, 2}));

    auto hh = make_presentation(hedgehog(), Schedule::DyadicPaper);
    u64 t0 = idx(hh, hedge_point(0, Rational(1)));
    u64 t1 = idx(hh, hedge_point(1, Rational(1)));
    CHECK(ball_apart(hh, {t0, 1}, {t1, 1}));
    u64 hub = idx(hh, hedge_point(0, Rational(0)));
    CHECK(ball_apart(hh, {hub, 0}, {t1, 1}));
    u64 mid = idx(hh, hedge_point(1, R("1/2")));
    CHECK_FALSE(ball_apart(hh, {hub, 0}, {mid, 1}));
}

// Exhaustive cross-check of the exact deciders against membership on a point sample.
TEST_CASE("deciders agree with sampled membership") {
    std::vector<Presentation> ps;
    ps.push_back(unit_paper());
    ps.push_back(make_presentation(unit_interval(), Schedule::DyadicTop));
    ps.push_back(make_presentation(real_line(), Schedule::DyadicPaper));
    ps.push_back(make_presentation(hedgehog(), Schedule::DyadicPaper));
    ps.push_back(make_presentation(interval_space({{Rational(0), R("1/4")}, {R("1/2"), R("1/2")}, {R("3/4"), Rational(1)}}),
                                   Schedule::DyadicPaper));
    ps.push_back(make_presentation(scaled(R("1/4"), unit_interval()), Schedule::DyadicPaper));
    ps.push_back(pushforward_presentation(unit_paper(), affine_homeo(Rational(-1), Rational(1))));
    ps.push_back(pushforward_presentation(
        unit_paper(), pl_homeo({Rational(0), R("1/3"), Rational(1)}, {Rational(0), R("2/3"), Rational(1)})));
    ps.push_back(make_presentation(baire_space(), Schedule::AlignedUltra));
    ps.push_back(make_presentation(baire_space(), Schedule::DyadicPaper));
    ps.push_back(make_presentation(
        amalgam({{unit_interval(), R("1/2"), R("1/8")}, {unit_interval(), Rational(0), R("1/8")}}),
        Schedule::DyadicPaper));
    for (const auto& p : ps) {
        CAPTURE(p.space->describe());
        const u64 N = 40;
        std::vector<Point> pts;
        for (u64 i = 0; i < 200; ++i) pts.push_back(dense_point(p, i));
        for (u64 i = 0; i < N; i += 3)
            for (u64 j = 0; j < N; j += 2)
                for (std::uint32_t k = 0; k < 4; ++k)
                    for (std::uint32_t l = 0; l < 4; ++l) {
                        BallId n{i, k}, m{j, l};
                        bool below = ball_strictly_below(p, n, m);
                        bool apart = ball_apart(p, n, m);
                        CHECK_FALSE((below && apart));
                        if (triangle_below(p, n, m)) CHECK(below);
                        // sampled points must respect the decisions
                        for (const auto& q : pts) {
                            bool cm = in_ball(p, pts[j], l, q, true);
                            if (below && cm) CHECK(in_ball(p, pts[i], k, q, false));
                            if (apart && cm) CHECK_FALSE(in_ball(p, pts[i], k, q, true));
                        }
                    }
    }
}

TEST_CASE("Baire aligned cylinder calculus") {
    auto p = make_presentation(baire_space(), Schedule::AlignedUltra);
    for (u64 i = 0; i < 60; ++i)
        for (u64 j = 0; j < 60; ++j)
            for (std::uint32_t k = 0; k < 4; ++k)
                for (std::uint32_t l = 0; l < 4; ++l) {
                    auto x = std::get<Branch>(dense_point(p, i).v);
                    auto y = std::get<Branch>(dense_point(p, j).v);
                    bool exp_below = k < l && x.prefix(k) == y.prefix(k);
                    CHECK(ball_strictly_below(p, {i, k}, {j, l}) == exp_below);
                    auto n = std::min(k, l);
                    bool exp_apart = x.prefix(n) != y.prefix(n);
                    CHECK(ball_apart(p, {i, k}, {j, l}) == exp_apart);
                }
}

TEST_CASE("validation") {
    auto bad = make_presentation(
        finite_space({"a", "b"}, {{Rational(0), Rational(1)}, {Rational(2), Rational(0)}}), Schedule::DyadicPaper);
    auto rep = validate_presentation(bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.str().find("symmetry violated at (0,1)") != std::string::npos);

    auto baire = validate_presentation(make_presentation(baire_space(), Schedule::AlignedUltra));
    CHECK(baire.ok);
    CHECK(baire.str().find("whole-space ball: yes") != std::string::npos);

    auto un = validate_presentation(unit_paper());
    CHECK(un.ok);
    CHECK(un.str().find("whole-space ball: no") != std::string::npos);
    CHECK(validate_presentation(make_presentation(unit_interval(), Schedule::DyadicTop)).whole_space_ball);
    CHECK(validate_presentation(make_presentation(unit_interval(), Schedule::AlignedUltra)).whole_space_ball);
    CHECK(validate_presentation(make_presentation(hedgehog(), Schedule::DyadicTop)).ok);

    auto al = validate_presentation(make_presentation(unit_interval(), Schedule::AlignedUltra));
    CHECK(al.str().find("intended for ultrametric") != std::string::npos);
}

TEST_CASE("pushforward and dense swaps") {
    auto un = unit_paper();
    auto refl = pushforward_presentation(un, affine_homeo(Rational(-1), Rational(1)));
    for (u64 i = 0; i < 30; ++i) {
        CHECK(dense_point(refl, i) == line_point(Rational(1) - std::get<Rational>(dense_point(un, i).v)));
        for (u64 j = 0; j < 30; ++j) CHECK(dist(refl, i, j) == dist(un, i, j));
    }
    CHECK_THROWS_AS(pushforward_presentation(un, affine_homeo(Rational(2), Rational(0))), SpaceError);
    CHECK_THROWS_AS(pushforward_presentation(refl, identity_homeo()), SpaceError);

    auto baire = make_presentation(baire_space(), Schedule::AlignedUltra);
    auto same = pushforward_presentation(baire, identity_homeo());
    for (u64 i = 0; i < 20; ++i)
        for (u64 j = 0; j < 20; ++j)
            CHECK(ball_strictly_below(same, {i, 1}, {j, 2}) == ball_strictly_below(baire, {i, 1}, {j, 2}));

    DenseSpec excl;
    excl.rule = DenseRule::ExcludePoint;
    excl.excluded = line_point(Rational(0));
    auto open0 = dense_swap(un, excl);
    for (u64 i = 0; i < 200; ++i) CHECK_FALSE(dense_point(open0, i) == line_point(Rational(0)));
    CHECK(dense_point(open0, 0) == line_point(Rational(1)));
    CHECK(dense_index(open0, line_point(R("1/2"))) == 1u);

    DenseSpec one;
    one.rule = DenseRule::EventuallyOne;
    auto b1 = dense_swap(baire, one);
    CHECK(dense_point(b1, 0) == branch_point(Branch::constant(1)));
    CHECK(dense_index(b1, branch_point(Branch::constant(0))) == std::nullopt);
    CHECK_THROWS_AS(dense_swap(un, one), SpaceError);

    auto fin = make_presentation(finite_space({"a", "b", "c"}, {{Rational(0), Rational(1), Rational(2)},
                                                                {Rational(1), Rational(0), Rational(1)},
                                                                {Rational(2), Rational(1), Rational(0)}}),
                                 Schedule::DyadicPaper);
    DenseSpec perm;
    perm.rule = DenseRule::Permuted;
    perm.perm = {2, 0, 1};
    auto fp = dense_swap(fin, perm);
    CHECK(dense_point(fp, 0) == finite_point(2));
    CHECK(dist(fp, 0, 1) == Rational(2));
    CHECK(ball_strictly_below(fp, {1, 0}, {1, 2}) == ball_strictly_below(fin, {0, 0}, {0, 2}));
}

TEST_CASE("hedgehog and line dense enumerations") {
    auto hh = make_presentation(hedgehog(), Schedule::DyadicPaper);
    CHECK(dense_point(hh, 0) == hedge_point(0, Rational(0)));
    for (u64 i = 0; i < 500; ++i) CHECK(dense_index(hh, dense_point(hh, i)) == i);
    auto iv = make_presentation(interval_space({{Rational(0), R("1/4")}, {R("1/2"), R("1/2")}, {R("3/4"), Rational(1)}}),
                                Schedule::DyadicPaper);
    CHECK(dense_point(iv, 0) == line_point(R("1/2")));
    for (u64 i = 0; i < 500; ++i) CHECK(dense_index(iv, dense_point(iv, i)) == i);
    CHECK_THROWS_AS(interval_space({{Rational(0), Rational(1)}, {R("1/2"), Rational(2)}}), SpaceError);
    CHECK(is_compact(*iv.space));
    CHECK_FALSE(is_compact(*hedgehog()));
    CHECK(is_ultrametric(*baire_space()));
    CHECK_FALSE(is_ultrametric(*unit_interval()));
}
