#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "a2g/manifold.hpp"
#include "a2g/qos.hpp"

namespace a2g {

struct AggregationConfig {
    double eta = 0.0;   // server step on the trust-weighted gradient
    double beta = 0.05; // geometry gain in [0, 1]
    QosGains gains;

    void validate() const;
};

// What a client sends back after a round of local work.
struct ClientReport {
    std::size_t client_id = 0;
    ParamPoint params;
    std::optional<std::vector<double>> grad;
    QosSample qos;
    std::size_t shard_size = 0;
};

// g_agg = sum_i w_i g_i. Every report must carry a gradient of the same dimension.
std::vector<double> aggregate_gradients(std::span<const ClientReport> reports,
                                        const TrustWeights& weights);

struct A2gUpdate {
    ParamPoint next;
    TrustWeights weights;
    CorrectionVec correction;
    // Present whenever every report carried a gradient, even with eta == 0.
    std::optional<std::vector<double>> aggregated_gradient;
};

// theta_{t+1} = canonicalize(theta_t - eta * g_agg + beta * Psi), with trust
// weights from the reports' QoS samples and shard sizes. Angular coordinates
// are wrapped once, after the full additive step. Reports are taken in
// client_id order whatever their input order, and the returned weights follow
// that order. Duplicate client ids are rejected.
A2gUpdate a2g_update(const ParamPoint& global, std::span<const ClientReport> reports,
                     const AggregationConfig& cfg);

// Shard-size weighted arithmetic mean of client parameters. Euclidean only.
// Shares no code with a2g_update; used as the reference for FedAvg recovery.
ParamPoint fedavg_oracle(std::span<const ClientReport> reports);

}  // namespace a2g
