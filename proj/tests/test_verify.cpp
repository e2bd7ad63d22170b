#include <doctest.h>

#include <set>

#include "cbr/branch.hpp"
#include "cbr/verify.hpp"

using namespace cbr;

namespace {

const Catalog& cat() {
    static const Catalog c = default_catalog();
    return c;
}

RankCache& cache() {
    static RankCache c;
    return c;
}

}  // namespace

TEST_CASE("check ids") {
    CHECK(check_defs().size() == 14);
    for (const auto& d : check_defs()) {
        auto id = parse_check(d.name);
        REQUIRE(id);
        CHECK(*id == d.id);
        CHECK(&check_def(d.id) == &d);
        CHECK_FALSE(d.statement.empty());
    }
    CHECK_FALSE(parse_check("NOT_A_CHECK"));
    CHECK_FALSE(parse_check("lower_bound"));
}

TEST_CASE("default catalog") {
    std::set<std::string> ids;
    std::size_t sound = 0, baire = 0, compact = 0;
    for (const auto& e : cat()) {
        CHECK(ids.insert(e.id).second);
        if (witness_depth_bound(e.p, e.F)) ++sound;
        baire += e.tags.count("baire");
        compact += e.tags.count("compact");
    }
    CHECK(sound >= 30);
    CHECK(baire >= 10);
    CHECK(compact >= 10);
}

TEST_CASE("every check passes on the default catalog") {
    for (const auto& d : check_defs()) {
        CAPTURE(d.name);
        auto r = run_check(d.id, cat(), cache());
        CHECK(r.id == d.name);
        CHECK(r.pass);
        CHECK_FALSE(r.records.empty());
        for (const auto& rec : r.records) {
            CAPTURE(rec.instance);
            CHECK(rec.verdict != "FAIL");
            CHECK(rec.verdict != "SKIP");
        }
    }
}

TEST_CASE("oracle agreement") {
    auto r = oracle_equivalence(cat(), cache());
    CHECK(r.pass);
    std::size_t passed = 0;
    for (const auto& rec : r.records) passed += rec.verdict == "PASS";
    CHECK(passed >= 30);
}

TEST_CASE("report lines") {
    auto r = run_check(CheckId::LOWER_BOUND, cat(), cache());
    auto text = r.lines();
    CHECK(text.find("LOWER_BOUND,unit-empty,0,0,PASS\n") != std::string::npos);
    CHECK(text.find("LOWER_BOUND,unit-emb2,3,w*2+1,PASS\n") != std::string::npos);
    // deterministic
    CHECK(run_check(CheckId::LOWER_BOUND, cat(), cache()).lines() == text);
    CHECK(r.text().find("verdict: PASS") != std::string::npos);
}

TEST_CASE("switch gallery rows") {
    auto r = run_check(CheckId::SWITCH_GALLERY, cat(), cache());
    std::map<std::string, CheckRecord> by;
    for (const auto& rec : r.records) by[rec.instance] = rec;
    for (int a = 2; a <= 6; ++a) {
        auto id = "switch-" + std::to_string(a);
        REQUIRE(by.count(id));
        CHECK(by[id].lhs == std::to_string(a));
        CHECK(by[id].verdict == "PASS");
    }
    for (int a = 2; a <= 4; ++a) CHECK(by["switch-" + std::to_string(a) + ":oracle"].verdict == "PASS");
    CHECK(by["switch-w"].lhs == "w+1");
    CHECK(by["switch-w"].verdict == "NOTE");
    CHECK(by["monotone:w<w+1"].verdict == "PASS");
    CHECK(by["successor:w+1"].verdict == "PASS");
}

TEST_CASE("sigma-compact witnesses") {
    auto r = run_check(CheckId::SIGMA_COMPACT_BOUND, cat(), cache());
    REQUIRE(r.pass);
    std::set<std::string> groups;
    for (const auto& [k, v] : r.witnesses) groups.insert(k);
    CHECK(groups.count("unit/paper"));
    CHECK(groups.count("line/paper"));
    CHECK(groups.count("hedgehog/paper"));
}

TEST_CASE("unsupported instances are reported, not skipped silently") {
    Catalog c;
    CatalogEntry e;
    e.id = "baire-base-paper";
    e.space_name = "baire";
    e.p = make_presentation(baire_space(), Schedule::DyadicPaper);
    e.F = branch_family(t_base());
    c.push_back(e);
    RankCache local;
    auto r = run_check(CheckId::LOWER_BOUND, c, local);
    CHECK_FALSE(r.pass);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].verdict == "SKIP");
    CHECK_FALSE(r.records[0].note.empty());
}
