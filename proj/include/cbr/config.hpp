#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/sets.hpp"

namespace cbr {

// Experiment files are line oriented:
//
//   # comment
//   [space unit]
//   kind = interval
//   parts = 0..1
//
//   [presentation P]
//   space = unit
//   schedule = paper
//
//   [set F]
//   kind = points
//   points = 0 1/2
//
//   [run r]
//   command = rank
//   presentation = P
//   set = F
//
// Lists are whitespace separated. Values are stored in canonical text form, so
// format_config(parse_config(t)) is a fixed point of parse_config.

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

struct ConfigBlock {
    std::string type;  // space | presentation | set | run
    std::string name;
    std::map<std::string, std::string> values;
    int line = 0;  // header line; not part of equality

    bool operator==(const ConfigBlock& o) const { return type == o.type && name == o.name && values == o.values; }
    const std::string* get(const std::string& key) const;
};

struct ExperimentConfig {
    std::vector<ConfigBlock> blocks;
    std::vector<std::string> warnings;

    bool operator==(const ExperimentConfig& o) const { return blocks == o.blocks; }
    const ConfigBlock* find(const std::string& type, const std::string& name) const;
    std::vector<const ConfigBlock*> of_type(const std::string& type) const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string format_config(const ExperimentConfig& cfg);

// "#3" finite, "hub" / "s1:1/4" hedgehog, "<0,1|2>" Baire, otherwise a rational
Point parse_point(std::string_view text);
// standard | exclude:<point> | eventually-one | permuted:<i,j,...>
DenseSpec parse_dense(std::string_view text);

SpacePtr build_space(const ExperimentConfig& cfg, const std::string& name);
Presentation build_presentation(const ExperimentConfig& cfg, const std::string& name);
ClosedSetSpec build_set(const ExperimentConfig& cfg, const std::string& name);

}  // namespace cbr
