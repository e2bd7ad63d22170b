#include <doctest.h>

#include "cbr/branch.hpp"
#include "cbr/ksigma.hpp"

using namespace cbr;

TEST_CASE("ksigma values") {
    auto I = ksigma_rank(*unit_interval());
    CHECK(I.rank == Ordinal(1));
    CHECK(I.stabilized_empty);

    auto H = ksigma_rank(*hedgehog());
    CHECK(H.rank == Ordinal(2));
    CHECK(H.stabilized_empty);
    REQUIRE(H.chain.size() == 3);
    CHECK(H.chain[1].kind == SubspaceDesc::Hub);

    auto B = ksigma_rank(*baire_space());
    CHECK(B.rank == Ordinal(0));
    CHECK_FALSE(B.stabilized_empty);

    CHECK(ksigma_rank(*real_line()).rank == Ordinal(1));
    CHECK(ksigma_rank(*scaled(Rational(mpq_class(1, 2)), hedgehog())).rank == Ordinal(2));
}

TEST_CASE("compact and degenerate spaces") {
    auto fin = finite_space({"a", "b"}, {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}});
    CHECK(ksigma_rank(*fin).rank == Ordinal(1));
    Space none{FiniteSpace{}};
    auto E = ksigma_rank(none);
    CHECK(E.rank == Ordinal(0));
    CHECK(E.stabilized_empty);
}

TEST_CASE("local compactness decider") {
    using K = SubspaceDesc;
    auto h = hedgehog();
    CHECK(locally_compact_points(*h, {K::Whole}).kind == K::NoHub);
    CHECK(locally_compact_points(*h, {K::Hub}).kind == K::Hub);
    CHECK(locally_compact_points(*unit_interval(), {K::Whole}).kind == K::Whole);
    CHECK(remainder(*h, {K::Whole}).kind == K::Hub);
    CHECK_THROWS_AS(ksigma_rank(*ultra_table(t_base())), KSigmaError);
}

TEST_CASE("chains weakly decrease and agree with sigma-compactness") {
    for (auto s : {unit_interval(), real_line(), hedgehog(), baire_space()}) {
        auto R = ksigma_rank(*s);
        bool sigma = s->family() != Family::Baire;
        CHECK(R.stabilized_empty == sigma);
        for (std::size_t i = 1; i < R.chain.size(); ++i) CHECK_FALSE(R.chain[i] == R.chain[i - 1]);
    }
}
