#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cbr/engine.hpp"
#include "cbr/ksigma.hpp"

namespace cbr {

enum class CheckId {
    LOWER_BOUND,
    ULTRA_DENSE_INDEP,
    PROPER_DENSE_INDEP,
    PLUS_ONE_BOUND,
    DENSE_CHANGE_BOUND,
    SCALED_METRIC_BOUND,
    EQUIV_METRIC_BOUND,
    HOMEO_TRANSPORT,
    SWITCH_GALLERY,
    COMPACT_UPPER,
    SUCCESSOR_ON_COMPACT,
    REFINEMENT,
    SIGMA_COMPACT_BOUND,
    DISCRETE_UNBOUNDED,
};

struct CheckDef {
    CheckId id;
    std::string name;
    std::string statement;  // the inequality or equality being checked
};

const std::vector<CheckDef>& check_defs();
const CheckDef& check_def(CheckId id);
std::optional<CheckId> parse_check(const std::string& name);

struct CatalogEntry {
    std::string id;
    std::string space_name;
    Presentation p;
    ClosedSetSpec F;
    std::set<std::string> tags;  // compact, sigma, baire, proper, line, switch, canonical-sequence-dependent
    std::optional<Ordinal> switch_alpha;
    std::optional<Presentation> alt_dense;                  // same space, second dense enumeration
    std::optional<std::pair<std::uint32_t, Presentation>> scaled;  // k and the presentation with metric 2^-k·d
    std::optional<Presentation> equiv;                      // an equivalent metric
    std::optional<Homeo> homeo;                             // transport gallery
};
using Catalog = std::vector<CatalogEntry>;

Catalog default_catalog();

struct CheckRecord {
    std::string instance;
    std::string lhs, rhs;
    std::string verdict;  // PASS | FAIL | SKIP | NOTE
    std::string note;
};

struct CheckReport {
    std::string id;
    std::vector<CheckRecord> records;
    std::vector<std::pair<std::string, std::string>> witnesses;
    bool pass = true;

    std::string lines() const;  // check_id,instance_id,lhs,rhs,verdict
    std::string text() const;
};

// Ranks are memoized per (instance, role); safe to share between checks.
class RankCache {
public:
    Ordinal rank(const std::string& key, const Presentation& p, const ClosedSetSpec& F);
    RankResult result(const std::string& key, const Presentation& p, const ClosedSetSpec& F);

private:
    std::mutex mu_;
    std::map<std::string, RankResult> memo_;
};

CheckReport run_check(CheckId id, const Catalog& cat, RankCache& cache);
// dp_rank against brute_force_rank on every instance with a sound truncation depth
CheckReport oracle_equivalence(const Catalog& cat, RankCache& cache);

}  // namespace cbr
