#include "a2g/channel.hpp"

#include <algorithm>
#include <limits>

#include "a2g/errors.hpp"

namespace a2g {

void ChannelConfig::validate() const {
    if (!(flip_prob >= 0.0 && flip_prob < 1.0)) {
        throw StructuralError("channel flip_prob must lie in [0, 1)");
    }
    if (trials_per_round < 1) throw StructuralError("channel trials_per_round must be >= 1");
    if (!std::isfinite(latency_log_mean)) throw StructuralError("latency_log_mean must be finite");
    if (!(latency_log_sigma >= 0.0) || !std::isfinite(latency_log_sigma)) {
        throw StructuralError("latency_log_sigma must be >= 0");
    }
    if (!(tau_max > 0.0)) throw StructuralError("tau_max must be positive");
    if (!(s_max >= 0.0)) throw StructuralError("s_max must be nonnegative");
    if (instability_window < 1) throw StructuralError("instability_window must be >= 1");
}

std::optional<double> noise_preset(std::string_view name) {
    if (name == "low") return 0.01;
    if (name == "medium") return 0.06;
    if (name == "high") return 0.12;
    return std::nullopt;
}

double sample_fidelity(const ChannelConfig& cfg, RngStream& rng) {
    cfg.validate();
    std::size_t successes = 0;
    for (std::size_t i = 0; i < cfg.trials_per_round; ++i) {
        if (!rng.bernoulli(cfg.flip_prob)) ++successes;
    }
    const double m = static_cast<double>(cfg.trials_per_round);
    return std::max(static_cast<double>(successes) / m, 1.0 / (2.0 * m));
}

double sample_latency(const ChannelConfig& cfg, RngStream& rng) {
    cfg.validate();
    const double z = rng.normal();
    const double tau = std::exp(cfg.latency_log_mean + cfg.latency_log_sigma * z);
    // exp() underflows to 0 only for absurd log means; keep latency strictly positive.
    return std::clamp(tau, std::numeric_limits<double>::min(), cfg.tau_max);
}

double measure_instability(std::span<const double> loss_history, std::size_t window,
                           double s_max) {
    if (loss_history.empty()) throw StructuralError("measure_instability: empty loss history");
    if (window < 1) throw StructuralError("measure_instability: window must be >= 1");
    const auto tail = loss_history.last(std::min(window, loss_history.size()));
    // Shifted by the first sample so a constant history gives exactly zero.
    const double n = static_cast<double>(tail.size());
    const double shift = tail.front();
    double sum = 0.0;
    for (double v : tail) sum += v - shift;
    const double mean = sum / n;
    double var = 0.0;
    for (double v : tail) var += (v - shift - mean) * (v - shift - mean);
    var /= n;
    return std::min(var, s_max);
}

}  // namespace a2g
