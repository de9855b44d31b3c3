#include "a2g/qos.hpp"

#include <cmath>
#include <string>

#include "a2g/errors.hpp"

namespace a2g {

void QosGains::validate() const {
    if (!(alpha >= 0.0) || !(gamma >= 0.0) || !(delta >= 0.0)) {
        throw StructuralError("QoS gains must be nonnegative");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw StructuralError("QoS epsilon must be positive and finite");
    }
}

namespace {

void check_sample(const QosSample& s) {
    if (!std::isfinite(s.fidelity) || !std::isfinite(s.latency) || !std::isfinite(s.instability)) {
        throw StructuralError("QoS sample contains a non-finite value");
    }
    if (s.fidelity < 0.0 || s.fidelity > 1.0) {
        throw StructuralError("fidelity " + std::to_string(s.fidelity) + " outside [0, 1]");
    }
    if (s.latency < 0.0) throw StructuralError("latency must be nonnegative");
    if (s.instability < 0.0) throw StructuralError("instability must be nonnegative");
}

}  // namespace

double qos_factor(const QosSample& sample, const QosGains& gains) {
    gains.validate();
    check_sample(sample);
    const double num = std::pow(sample.fidelity, gains.alpha);
    const double den = std::pow(sample.latency + gains.epsilon, gains.gamma) *
                       std::pow(sample.instability + gains.epsilon, gains.delta);
    const double q = num / den;
    if (!std::isfinite(q)) throw StructuralError("QoS factor is not finite");
    return q;
}

double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

TrustWeights trust_weights(std::span<const QosSample> samples,
                           std::span<const std::size_t> shard_sizes, const QosGains& gains) {
    if (samples.empty()) throw StructuralError("trust_weights: no clients");
    if (samples.size() != shard_sizes.size()) {
        throw StructuralError("trust_weights: sample count != shard size count");
    }
    const std::size_t k = samples.size();

    std::vector<double> sizes(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (shard_sizes[i] == 0) throw StructuralError("trust_weights: shard sizes must be positive");
        sizes[i] = static_cast<double>(shard_sizes[i]);
    }
    const double total_size = pairwise_sum(sizes);

    TrustWeights out;
    out.qos_factors.resize(k);
    out.raw_scores.resize(k);
    std::vector<double> fractions(k);
    bool any_alive = false;
    for (std::size_t i = 0; i < k; ++i) {
        fractions[i] = sizes[i] / total_size;
        out.qos_factors[i] = qos_factor(samples[i], gains);
        out.raw_scores[i] = fractions[i] * out.qos_factors[i];
        any_alive = any_alive || out.raw_scores[i] > kRawScoreFloor;
    }

    if (!any_alive) {
        out.weights = fractions;
        out.fallback = true;
        return out;
    }
    const double norm = pairwise_sum(out.raw_scores);
    out.weights.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.weights[i] = out.raw_scores[i] / norm;
    return out;
}

TrustWeights reduced_weights(std::span<const QosSample> samples, double alpha, double epsilon) {
    if (samples.empty()) throw StructuralError("reduced_weights: no clients");
    QosGains{alpha, alpha, alpha, epsilon}.validate();
    const std::size_t k = samples.size();

    TrustWeights out;
    out.qos_factors.resize(k);
    out.raw_scores.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const QosSample& s = samples[i];
        check_sample(s);
        out.qos_factors[i] = std::pow(s.fidelity, alpha) * std::pow(s.latency + epsilon, -alpha) *
                             std::pow(s.instability + epsilon, -alpha);
        out.raw_scores[i] = out.qos_factors[i];
    }
    const double norm = pairwise_sum(out.raw_scores);
    out.weights.resize(k);
    if (!(norm > kRawScoreFloor)) {
        out.weights.assign(k, 1.0 / static_cast<double>(k));
        out.fallback = true;
        return out;
    }
    for (std::size_t i = 0; i < k; ++i) out.weights[i] = out.raw_scores[i] / norm;
    return out;
}

}  // namespace a2g
