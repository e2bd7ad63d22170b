#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cbr/cli.hpp"

using namespace cbr;

namespace {

const char* kMinimal = R"(# one space, one set, one run
[space unit]
kind = interval

[presentation P]
space = unit

[set two]
kind = points
points = 0 1/2

[run r]
command = rank
presentation = P
set = two
)";

const char* kFull = R"([space unit]
kind = interval
parts = 0..1

[space half]
kind = scaled
factor = 2/4
of = unit

[space b]
kind = baire

[space h]
kind = hedgehog

[space f]
kind = finite
positions = 0 1/4 1

[presentation P]
space = unit
dense = exclude:1/2

[presentation H]
space = half
schedule = top

[presentation U]
space = b
schedule = aligned
dense = eventually-one

[presentation Hh]
space = h

[presentation F]
space = f
dense = permuted:2,1,0

[set two]
kind = points
points = 0 2/4

[set pkg]
kind = package
points = 1/2
seqs = 0:1

[set emb]
kind = embedding
alpha = 2

[set base]
kind = base

[set one]
kind = single
branch = <1,2|0>

[set sw]
kind = switch
alpha = w+1

[set spines]
kind = points
points = s0:1/2 s1:1/4 hub

[set fin]
kind = points
points = #0 #2

[set none]
kind = empty

[run a]
command = rank
presentation = P
set = pkg

[run b]
command = trace
presentation = U
set = sw
format = dot
out = sw.dot

[run c]
command = verify
checks = LOWER_BOUND REFINEMENT

[run d]
command = rank
presentation = Hh
set = spines

[run e]
command = rank
presentation = F
set = fin
)";

struct Proc {
    int code;
    std::string out;
};

Proc sh(const std::string& args) {
    std::string cmd = std::string(CBRANK_EXE) + " " + args + " 2>&1";
    Proc p{0, ""};
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    std::array<char, 4096> buf;
    while (auto n = std::fread(buf.data(), 1, buf.size(), f)) p.out.append(buf.data(), n);
    int st = pclose(f);
    p.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return p;
}

std::string errors_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::filesystem::path tmpdir() {
    auto d = std::filesystem::temp_directory_path() / "cbrank_test";
    std::filesystem::create_directories(d);
    return d;
}

std::string write_file(const std::string& name, const std::string& text) {
    auto p = tmpdir() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("minimal config") {
    auto cfg = parse_config(kMinimal);
    CHECK(cfg.blocks.size() == 4);
    CHECK(cfg.warnings.empty());
    auto j = config_job(cfg, "r");
    CHECK(j.space_name == "unit");
    CHECK(j.set_name == "two");
    auto r = cmd_rank(j, {});
    CHECK(r.code == 0);
    CHECK(r.out == "phi=2 cb=1 space=unit set=two\n");
}

TEST_CASE("round trip") {
    for (const char* text : {kMinimal, kFull}) {
        auto cfg = parse_config(text);
        auto again = parse_config(format_config(cfg));
        CHECK(again == cfg);
        CHECK(format_config(again) == format_config(cfg));
    }
    auto cfg = parse_config(kFull);
    CHECK(*cfg.find("space", "half")->get("factor") == "1/2");
    CHECK(*cfg.find("set", "two")->get("points") == "0 1/2");
    CHECK(*cfg.find("set", "spines")->get("points") == "s0:1/2 s1:1/4 hub");
}

TEST_CASE("config errors carry line numbers") {
    std::string e = errors_of("[space unit]\nkind = interval\nwidth = 3\n");
    CHECK(e.find("line 3") != std::string::npos);
    CHECK(e.find("unknown key 'width'") != std::string::npos);

    e = errors_of(std::string(kMinimal) + "\n[run bad]\ncommand = rank\npresentation = P\nset = missing\n");
    CHECK(e.find("dangling reference") != std::string::npos);
    CHECK(e.find("'missing'") != std::string::npos);

    // every error is reported, not only the first
    e = errors_of("[space a]\nkind = disc\n[set s]\nkind = points\npoints = 1/0\nfoo\n");
    CHECK(e.find("line 2") != std::string::npos);
    CHECK(e.find("line 5") != std::string::npos);
    CHECK(e.find("line 6") != std::string::npos);

    CHECK(errors_of("[set s]\nkind = switch\nalpha = w+\n").find("alpha") != std::string::npos);
    CHECK(errors_of("kind = interval\n").find("outside of a block") != std::string::npos);
    CHECK(errors_of("[widget w]\n").find("unknown block type") != std::string::npos);
    CHECK(errors_of("[set s]\nkind = empty\n[set s]\nkind = base\n").find("duplicate set name") != std::string::npos);
    CHECK(errors_of("[space u]\nkind = interval\n[presentation P]\nspace = u\n").empty());
    CHECK_FALSE(errors_of("[space u]\nkind = interval\n[presentation P]\nspace = u\nschedule = fast\n").empty());
    // a set outside its space
    e = errors_of(std::string(kMinimal) + "\n[set far]\nkind = points\npoints = 3\n[run x]\ncommand = rank\npresentation = P\nset = far\n");
    CHECK(e.find("run 'x'") != std::string::npos);
}

TEST_CASE("aligned schedule on the unit interval warns") {
    auto cfg = parse_config("[space u]\nkind = interval\n[presentation P]\nspace = u\nschedule = aligned\n");
    REQUIRE(cfg.warnings.size() == 1);
    CHECK(cfg.warnings[0].find("line 3") != std::string::npos);
    CHECK(parse_config("[space b]\nkind = baire\n[presentation P]\nspace = b\nschedule = aligned\n").warnings.empty());
}

TEST_CASE("points and dense rules") {
    CHECK(parse_point("#3").str() == "#3");
    CHECK(parse_point("hub").str() == "hub");
    CHECK(parse_point("s2:3/6").str() == "s2:1/2");
    CHECK(parse_point("<0,1|2>").str() == Branch::make({0, 1}, 2).str());
    CHECK(parse_point("-3/4").str() == "-3/4");
    CHECK_THROWS(parse_point("s1:0"));
    CHECK_THROWS(parse_point("x"));
    CHECK(parse_dense("permuted:1,0").perm == std::vector<std::size_t>{1, 0});
    CHECK_THROWS(parse_dense("permuted:1,1"));
    CHECK(parse_dense("exclude:1/2").str() == "exclude:1/2");
    CHECK_THROWS(parse_dense("shuffled"));
}

TEST_CASE("rank values") {
    auto cfg = parse_config(kFull);
    CHECK(cmd_rank(config_job(cfg, "a"), {}).out == "phi=w+1 cb=2 space=unit set=pkg\n");
    CHECK(cmd_rank(config_job(cfg, "d"), {}).code == 0);
    CHECK(cmd_rank(config_job(cfg, "e"), {}).code == 0);

    auto base = catalog_job(default_catalog(), "baire-base");
    CHECK(cmd_rank(base, {}).out == "phi=2 cb=1 space=baire set=baire-base\n");
    auto empty = catalog_job(default_catalog(), "baire-empty");
    CHECK(cmd_rank(empty, {}).out.rfind("phi=0 cb=0 ", 0) == 0);

    CliOptions o;
    o.oracle_check = true;
    auto r = cmd_rank(base, o);
    CHECK(r.code == 0);
    CHECK(r.out.find(" oracle=2 ") != std::string::npos);
    // no sound truncation depth for a transfinite rank
    CHECK(cmd_rank(config_job(cfg, "a"), o).code == 1);

    CliOptions cap;
    cap.max_ordinal = Ordinal(3);
    CHECK(cmd_rank(config_job(cfg, "a"), cap).code == 1);
}

TEST_CASE("overrides") {
    auto cfg = parse_config(kMinimal);
    CliOptions o;
    o.schedule = Schedule::DyadicTop;
    o.dense = parse_dense("exclude:1/3");
    auto r = cmd_rank(config_job(cfg, "r"), o);
    CHECK(r.code == 0);
    CHECK(r.out.rfind("phi=", 0) == 0);
}

TEST_CASE("trace output") {
    auto single = catalog_job(default_catalog(), "baire-single");
    auto r = cmd_trace(single, {}, "csv", "");
    CHECK(r.code == 0);
    CHECK(r.out == "stage,alive_count,alive\n0,1,0\n1,0,\n");

    auto dot = cmd_trace(catalog_job(default_catalog(), "baire-base"), {}, "dot", "");
    CHECK(dot.out.rfind("digraph", 0) == 0);

    auto path = (tmpdir() / "single.csv").string();
    CHECK(cmd_trace(single, {}, "csv", path).code == 0);
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == r.out);

    CHECK(cmd_trace(single, {}, "csv", "/nonexistent-dir/x.csv").code != 0);
    CHECK(cmd_trace(single, {}, "svg", "").code != 0);
}

TEST_CASE("verify command") {
    auto r = cmd_verify(default_catalog(), {"LOWER_BOUND"}, {}, true);
    CHECK(r.code == 0);
    CHECK(r.out.find("LOWER_BOUND,baire-base,1,2,PASS\n") != std::string::npos);
    CHECK(cmd_verify(default_catalog(), {"NOPE"}, {}, false).code != 0);

    auto cfg = parse_config(kFull);
    auto cat = config_catalog(cfg);
    CHECK(cat.size() == 4);
    auto v = cmd_verify(cat, {"LOWER_BOUND", "REFINEMENT"}, {}, false);
    CHECK(v.code == 0);
}

TEST_CASE("binary: exit codes and output") {
    auto cfg = write_file("min.cfg", kMinimal);
    auto p = sh("rank --config " + cfg);
    CHECK(p.code == 0);
    CHECK(p.out == "phi=2 cb=1 space=unit set=two\n");
    // determinism
    CHECK(sh("rank --config " + cfg).out == p.out);

    p = sh("rank --instance baire-base");
    CHECK(p.code == 0);
    CHECK(p.out == "phi=2 cb=1 space=baire set=baire-base\n");

    CHECK(sh("verify LOWER_BOUND").code == 0);
    p = sh("verify NOT_A_CHECK");
    CHECK(p.code != 0);
    CHECK(p.out.find("unknown check id") != std::string::npos);

    CHECK(sh("trace --instance baire-single --emit csv --out /nonexistent-dir/t.csv").code != 0);
    auto out = (tmpdir() / "t.dot").string();
    CHECK(sh("trace --instance baire-base --emit dot --out " + out).code == 0);
    CHECK(std::filesystem::exists(out));

    auto bad = write_file("bad.cfg", "[space u]\nkind = interval\nsize = 2\n");
    p = sh("rank --config " + bad);
    CHECK(p.code != 0);
    CHECK(p.out.find("line 3") != std::string::npos);

    auto extra = write_file("extra.cfg", std::string(kMinimal) + "schedule_unused = 1\n");
    CHECK(sh("rank --config " + extra).code != 0);

    CHECK(sh("").code != 0);
    CHECK(sh("rank").code != 0);
    CHECK(sh("rank --instance no-such-instance").code != 0);
    CHECK(sh("rank --instance unit-pkg --max-ordinal 3").code != 0);
    CHECK(sh("rank --instance unit-pkg --schedule sideways").code != 0);

    p = sh("gallery");
    CHECK(p.code == 0);
    CHECK(p.out.find("alpha=4 phi=4 cb=1\n") != std::string::npos);
    CHECK(p.out.find("alpha=w phi=w+1 cb=1 note=canonical-sequence-dependent\n") != std::string::npos);
}
