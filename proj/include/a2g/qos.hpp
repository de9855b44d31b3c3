#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace a2g {

// One round of link-quality measurements for one client.
struct QosSample {
    double fidelity = 1.0;     // (0, 1]
    double latency = 0.05;     // seconds, > 0
    double instability = 0.0;  // loss variance, >= 0
};

// Exponents on fidelity, latency and instability, plus the regularizer.
struct QosGains {
    double alpha = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double epsilon = 1e-8;

    void validate() const;
};

struct TrustWeights {
    std::vector<double> weights;      // normalized, sums to 1
    std::vector<double> raw_scores;   // p_i * q_i
    std::vector<double> qos_factors;  // q_i
    bool fallback = false;            // every raw score underflowed; weights == p_i
};

// Raw scores at or below this are treated as underflow.
inline constexpr double kRawScoreFloor = 1e-300;

// q = F^alpha / ((tau + eps)^gamma * (s2 + eps)^delta)
double qos_factor(const QosSample& sample, const QosGains& gains);

// Data-size fractions times QoS factors, normalized.
TrustWeights trust_weights(std::span<const QosSample> samples,
                           std::span<const std::size_t> shard_sizes, const QosGains& gains);

// QoS-only weighting with all three exponents tied to alpha and equal shards.
// Independent evaluation path, used as an oracle for trust_weights.
TrustWeights reduced_weights(std::span<const QosSample> samples, double alpha, double epsilon);

// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace a2g
