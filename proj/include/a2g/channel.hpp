#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "a2g/rng.hpp"

namespace a2g {

// Simulated teleportation link: bit-flip trials for fidelity, lognormal latency.
struct ChannelConfig {
    double flip_prob = 0.06;
    std::size_t trials_per_round = 32;
    double latency_log_mean = std::log(0.05);
    double latency_log_sigma = 0.5;
    double tau_max = 2.0;
    double s_max = 10.0;
    std::size_t instability_window = 10;

    void validate() const;
};

// Named noise regimes: "low" 0.01, "medium" 0.06, "high" 0.12.
std::optional<double> noise_preset(std::string_view name);

// Success fraction of trials_per_round Bernoulli(1 - p) trials, floored at
// 1 / (2 * trials_per_round) so fidelity stays strictly positive.
double sample_fidelity(const ChannelConfig& cfg, RngStream& rng);

// exp(mu + sigma * Z), capped at tau_max.
double sample_latency(const ChannelConfig& cfg, RngStream& rng);

// Population variance of the trailing min(window, size) losses, capped at s_max.
double measure_instability(std::span<const double> loss_history, std::size_t window,
                           double s_max);

}  // namespace a2g
