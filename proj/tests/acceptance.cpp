// Acceptance suite: one PASS/FAIL line per criterion; exit status 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "cbr/branch.hpp"
#include "cbr/cli.hpp"
#include "ordinal_oracle.hpp"

using namespace cbr;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

const Catalog& cat() {
    static const Catalog c = default_catalog();
    return c;
}

RankCache& cache() {
    static RankCache c;
    return c;
}

std::map<std::string, CheckRecord> by_instance(const CheckReport& r) {
    std::map<std::string, CheckRecord> m;
    for (const auto& rec : r.records) m[rec.instance] = rec;
    return m;
}

std::string failures(const CheckReport& r) {
    std::string s;
    for (const auto& rec : r.records)
        if (rec.verdict == "FAIL" || rec.verdict == "SKIP") s += " " + rec.instance + "[" + rec.verdict + "]";
    return s;
}

Outcome check_passes(CheckId id) {
    auto r = run_check(id, cat(), cache());
    Outcome o{r.pass, check_def(id).name + ": " + std::to_string(r.records.size()) + " rows"};
    if (!r.pass) o.detail += ";" + failures(r);
    return o;
}

Outcome ordinal_suite() {
    using namespace oracle;
    std::size_t pairs = 0, bad = 0;
    for (unsigned a = 0; a < 216; ++a) {
        unsigned ai = a / 36, aj = a / 6 % 6, ak = a % 6;
        Blocks ab = blocks_of(ai, aj, ak);
        Ordinal x = triple(ai, aj, ak);
        for (unsigned b = 0; b < 216; ++b) {
            unsigned bi = b / 36, bj = b / 6 % 6, bk = b % 6;
            Blocks bb = blocks_of(bi, bj, bk);
            Ordinal y = triple(bi, bj, bk);
            Blocks joined = ab;
            joined.insert(joined.end(), bb.begin(), bb.end());
            bool lt = std::tie(ai, aj, ak) < std::tie(bi, bj, bk);
            if (ord_add(x, y) != from_type(order_type(joined))) ++bad;
            if (ord_mul(x, y) != from_type(order_type(mul_blocks(ab, bb)))) ++bad;
            if ((ord_cmp(x, y) == Cmp::LT) != lt) ++bad;
            ++pairs;
        }
    }
    return {bad == 0 && pairs >= 10000,
            std::to_string(pairs) + " pairs (sum, product, order), " + std::to_string(bad) + " mismatches"};
}

// timed criteria start from an empty cache
Outcome oracle_equivalence_all() {
    RankCache fresh;
    auto r = oracle_equivalence(cat(), fresh);
    std::size_t ok = 0;
    for (const auto& rec : r.records) ok += rec.verdict == "PASS";
    Outcome o{r.pass && ok >= 30, std::to_string(ok) + " instances with a sound depth agree"};
    if (!r.pass) o.detail += ";" + failures(r);
    return o;
}

Outcome paper_point_values() {
    auto P = make_presentation(baire_space(), Schedule::AlignedUltra);
    Ordinal e = dp_rank(P, empty_set()).rank;
    Ordinal s = dp_rank(P, branch_family(t_single(Branch::constant(0)))).rank;
    Ordinal b = dp_rank(P, branch_family(t_base())).rank;
    return {e == Ordinal(0) && s == Ordinal(1) && b == Ordinal(2),
            "empty=" + ord_format(e) + " singleton=" + ord_format(s) + " Base=" + ord_format(b)};
}

Outcome switch_gallery() {
    RankCache fresh;
    auto r = run_check(CheckId::SWITCH_GALLERY, cat(), fresh);
    auto m = by_instance(r);
    bool ok = r.pass;
    std::string d = "phi:";
    for (int a = 2; a <= 6; ++a) {
        auto id = "switch-" + std::to_string(a);
        ok = ok && m.count(id) && m[id].lhs == std::to_string(a) && m[id].verdict == "PASS";
        d += " " + (m.count(id) ? m[id].lhs : "?");
        if (a <= 4) ok = ok && m[id + ":oracle"].verdict == "PASS";
    }
    for (const char* k : {"monotone:6<w", "monotone:w<w+1", "successor:w+1"}) ok = ok && m[k].verdict == "PASS";
    d += "; brute force agrees for alpha<=4; limit stages: w->" + m["switch-w"].lhs + ", w+1->" + m["switch-w+1"].lhs +
         " (recorded, canonical-sequence-dependent)";
    return {ok, d};
}

Outcome compact_upper_successor() {
    auto up = run_check(CheckId::COMPACT_UPPER, cat(), cache());
    auto su = run_check(CheckId::SUCCESSOR_ON_COMPACT, cat(), cache());
    auto mu = by_instance(up), ms = by_instance(su);
    bool ok = up.pass && su.pass;
    std::string d;
    for (const char* id : {"unit-emb1", "unit-emb2", "unit-emb3"}) {
        ok = ok && mu[id].verdict == "PASS" && ms[id].verdict == "PASS";
        d += std::string(d.empty() ? "" : ", ") + id + " phi=" + ms[id].lhs + " < " + mu[id].rhs;
    }
    return {ok, d + "; " + std::to_string(up.records.size()) + "+" + std::to_string(su.records.size()) + " rows"};
}

Outcome ultra_dense() {
    auto r = run_check(CheckId::ULTRA_DENSE_INDEP, cat(), cache());
    std::size_t baire = 0;
    for (const auto& e : cat()) baire += e.tags.count("baire") && e.alt_dense;
    std::size_t rows = 0, oracle_rows = 0;
    for (const auto& rec : r.records) (rec.instance.find(':') == std::string::npos ? rows : oracle_rows) += 1;
    bool ok = r.pass && rows == baire;
    return {ok, std::to_string(rows) + " of " + std::to_string(baire) + " Baire sets equal, " +
                    std::to_string(oracle_rows) + " also by brute force"};
}

Outcome two(CheckId a, CheckId b) {
    auto x = check_passes(a), y = check_passes(b);
    return {x.pass && y.pass, x.detail + "; " + y.detail};
}

Outcome sigma_compact() {
    auto r = run_check(CheckId::SIGMA_COMPACT_BOUND, cat(), cache());
    bool ok = r.pass;
    ok = ok && ksigma_rank(*unit_interval()).rank == Ordinal(1) && ksigma_rank(*real_line()).rank == Ordinal(1) &&
         ksigma_rank(*hedgehog()).rank == Ordinal(2);
    std::string d;
    for (const auto& [k, v] : r.witnesses)
        if (k == "unit/paper" || k == "line/paper" || k == "hedgehog/paper") d += (d.empty() ? "" : ", ") + k + " " + v;
    if (!r.pass) d += ";" + failures(r);
    return {ok, d};
}

Outcome refinement() {
    auto r = run_check(CheckId::REFINEMENT, cat(), cache());
    Outcome o{r.pass, std::to_string(r.records.size()) + " traces, zero violations"};
    if (!r.pass) o = {false, "violations:" + failures(r)};
    return o;
}

Outcome ksigma_values() {
    auto I = ksigma_rank(*unit_interval());
    auto H = ksigma_rank(*hedgehog());
    auto B = ksigma_rank(*baire_space());
    bool ok = I.rank == Ordinal(1) && I.stabilized_empty && H.rank == Ordinal(2) && H.stabilized_empty &&
              B.rank == Ordinal(0) && !B.stabilized_empty;
    auto s = [](const KSigmaResult& k) { return "(" + ord_format(k.rank) + "," + (k.stabilized_empty ? "true" : "false") + ")"; };
    return {ok, "[0,1] " + s(I) + ", hedgehog " + s(H) + ", Baire " + s(B)};
}

}  // namespace

int main() {
    struct Criterion {
        int n;
        std::string name;
        double limit_s;  // 0: no limit
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all = {
        {1, "ordinal suite", 10, ordinal_suite},
        {2, "oracle equivalence", 60, oracle_equivalence_all},
        {3, "point values on Baire space", 0, paper_point_values},
        {4, "SWITCH_GALLERY", 120, switch_gallery},
        {5, "LOWER_BOUND", 0, [] { return check_passes(CheckId::LOWER_BOUND); }},
        {6, "COMPACT_UPPER + SUCCESSOR_ON_COMPACT", 0, compact_upper_successor},
        {7, "ULTRA_DENSE_INDEP", 0, ultra_dense},
        {8, "DENSE_CHANGE_BOUND + PLUS_ONE_BOUND", 0, [] { return two(CheckId::DENSE_CHANGE_BOUND, CheckId::PLUS_ONE_BOUND); }},
        {9, "SCALED + EQUIV metric bounds", 0, [] { return two(CheckId::SCALED_METRIC_BOUND, CheckId::EQUIV_METRIC_BOUND); }},
        {10, "HOMEO_TRANSPORT", 0, [] { return check_passes(CheckId::HOMEO_TRANSPORT); }},
        {11, "SIGMA_COMPACT_BOUND", 0, sigma_compact},
        {12, "REFINEMENT", 0, refinement},
        {13, "ksigma values", 0, ksigma_values},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = c.limit_s == 0 || s < c.limit_s;
        bool pass = o.pass && in_time;
        failed += !pass;
        char timing[64];
        if (c.limit_s > 0) std::snprintf(timing, sizeof timing, "%.2fs < %.0fs", s, c.limit_s);
        else std::snprintf(timing, sizeof timing, "%.2fs", s);
        std::printf("%s  %2d  %-38s %s [%s]\n", pass ? "PASS" : "FAIL", c.n, c.name.c_str(), o.detail.c_str(), timing);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
