#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "a2g/orchestrator.hpp"

namespace a2g {

// Everything a CLI invocation can configure.
struct Settings {
    ExperimentConfig experiment;
    SweepAxis sweep_axis = SweepAxis::beta;
    std::vector<std::string> sweep_values;
};

// Flat "section.key = value" text. Blank lines and '#' comments are ignored,
// later assignments win. Lists are comma separated. Two write-only shortcut
// keys exist: aggregation.preset (fedavg | qos) and channel.noise
// (low | medium | high).
//
// Unknown keys, malformed values and failed validation throw ConfigError
// naming the offending key.
void apply_setting(Settings& settings, std::string_view key, std::string_view value);
void apply_config_text(Settings& settings, std::string_view text);
Settings load_settings(const std::string& path);

// Every key with its resolved value, in a fixed order. Feeding the output back
// through apply_config_text reproduces the same Settings.
std::string render_settings(const Settings& settings);

// The documented key list, one "key  description" line each.
std::string describe_keys();

// Splits "a, b ,c" into trimmed items; empty input gives an empty list.
std::vector<std::string> split_list(std::string_view text);

}  // namespace a2g
