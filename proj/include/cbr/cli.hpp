#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbr/config.hpp"
#include "cbr/verify.hpp"

namespace cbr {

struct CliOptions {
    std::optional<Schedule> schedule;  // overrides the presentation's schedule
    std::optional<DenseSpec> dense;    // overrides its dense sequence
    Ordinal max_ordinal = Ordinal::omega() * Ordinal::omega() * Ordinal(2);
    bool oracle_check = false;  // cross-validate every rank by brute force
};

struct CommandResult {
    int code = 0;  // 0 iff all requested work succeeded and every check passed
    std::string out, err;
};

// One (presentation, set) pair with the names used in reports.
struct Job {
    std::string name;
    Presentation p;
    ClosedSetSpec F;
    std::string space_name, set_name;
};

Job config_job(const ExperimentConfig& cfg, const std::string& run);
Job catalog_job(const Catalog& cat, const std::string& id);
// the rank and trace runs of a config as catalog entries, ids = run names
Catalog config_catalog(const ExperimentConfig& cfg);

// phi=<ordinal> cb=<ordinal> space=<name> set=<name>
CommandResult cmd_rank(const Job& job, const CliOptions& opt);
// writes to out_path, or to CommandResult::out when out_path is empty
CommandResult cmd_trace(const Job& job, const CliOptions& opt, const std::string& format, const std::string& out_path);
CommandResult cmd_verify(const Catalog& cat, const std::vector<std::string>& checks, const CliOptions& opt, bool lines);
// the switch gallery over Base: one line per stage
CommandResult cmd_gallery(const CliOptions& opt);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbr
