#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "a2g/orchestrator.hpp"

namespace a2g {

// One finished experiment ready for serialization.
struct RunOutput {
    std::string run_id;
    std::string axis_value;     // empty for a plain run
    std::string config_digest;  // full SHA-256 hex of the resolved config text
    RunSummary summary;
    std::string error;  // set when the run failed; summary is then empty
};

// First 12 hex chars of SHA-256 over the resolved config text and the seed.
std::string make_run_id(std::string_view resolved_config, std::uint64_t master_seed);

// Six significant digits, '.' separator, independent of the global locale.
std::string format_number(double v);

std::string rounds_csv(const std::vector<RunOutput>& runs);
std::string summary_csv(const std::vector<RunOutput>& runs);
std::string summary_json(const std::vector<RunOutput>& runs, std::string_view axis);

// Writes text to path, throwing std::runtime_error on I/O failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace a2g
