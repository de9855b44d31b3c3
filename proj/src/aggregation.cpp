#include "a2g/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "a2g/errors.hpp"

namespace a2g {

void AggregationConfig::validate() const {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw StructuralError("aggregation eta must be >= 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw StructuralError("aggregation beta must lie in [0, 1]");
    gains.validate();
}

std::vector<double> aggregate_gradients(std::span<const ClientReport> reports,
                                        const TrustWeights& weights) {
    if (reports.empty()) throw StructuralError("aggregate_gradients: no reports");
    if (weights.weights.size() != reports.size()) {
        throw StructuralError("aggregate_gradients: weight count != report count");
    }
    if (!reports.front().grad) {
        throw StructuralError("aggregate_gradients: client " +
                              std::to_string(reports.front().client_id) + " sent no gradient");
    }
    const std::size_t d = reports.front().grad->size();
    std::vector<double> g(d, 0.0);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& gi = reports[i].grad;
        if (!gi) {
            throw StructuralError("aggregate_gradients: client " +
                                  std::to_string(reports[i].client_id) + " sent no gradient");
        }
        if (gi->size() != d) throw StructuralError("aggregate_gradients: gradient dimension mismatch");
        for (std::size_t k = 0; k < d; ++k) g[k] += weights.weights[i] * (*gi)[k];
    }
    return g;
}

A2gUpdate a2g_update(const ParamPoint& global, std::span<const ClientReport> reports,
                     const AggregationConfig& cfg) {
    cfg.validate();
    if (reports.empty()) throw StructuralError("a2g_update: no client reports");

    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return reports[a].client_id < reports[b].client_id;
    });
    std::vector<ClientReport> sorted;
    sorted.reserve(reports.size());
    for (std::size_t i : order) {
        if (!sorted.empty() && sorted.back().client_id == reports[i].client_id) {
            throw StructuralError("a2g_update: duplicate report from client " +
                                  std::to_string(reports[i].client_id));
        }
        sorted.push_back(reports[i]);
    }

    std::vector<QosSample> samples;
    std::vector<std::size_t> sizes;
    std::vector<ParamPoint> clients;
    samples.reserve(reports.size());
    sizes.reserve(reports.size());
    clients.reserve(reports.size());
    bool all_grads = true;
    for (const auto& r : sorted) {
        if (!(r.params.spec() == global.spec())) {
            throw StructuralError("a2g_update: client " + std::to_string(r.client_id) +
                                  " parameters live on a different manifold");
        }
        if (r.grad && r.grad->size() != global.dim()) {
            throw StructuralError("a2g_update: client " + std::to_string(r.client_id) +
                                  " gradient dimension mismatch");
        }
        all_grads = all_grads && r.grad.has_value();
        samples.push_back(r.qos);
        sizes.push_back(r.shard_size);
        clients.push_back(r.params);
    }

    TrustWeights weights = trust_weights(samples, sizes, cfg.gains);
    CorrectionVec psi = geometry_correction(global, clients, weights.weights);

    std::optional<std::vector<double>> g_agg;
    if (all_grads) {
        g_agg = aggregate_gradients(sorted, weights);
    } else if (cfg.eta > 0.0) {
        throw StructuralError("a2g_update: eta > 0 requires a gradient from every client");
    }

    std::vector<double> next(global.coords().begin(), global.coords().end());
    for (std::size_t k = 0; k < next.size(); ++k) {
        if (cfg.eta > 0.0) next[k] -= cfg.eta * (*g_agg)[k];
        next[k] += cfg.beta * psi.coords[k];
    }
    return {ParamPoint(global.spec_ptr(), std::move(next)), std::move(weights), std::move(psi),
            std::move(g_agg)};
}

ParamPoint fedavg_oracle(std::span<const ClientReport> reports) {
    if (reports.empty()) throw StructuralError("fedavg_oracle: no reports");
    const auto& spec = reports.front().params.spec_ptr();
    if (!spec->is_euclidean()) throw StructuralError("fedavg_oracle: requires a Euclidean manifold");

    double total = 0.0;
    for (const auto& r : reports) total += static_cast<double>(r.shard_size);
    std::vector<double> mean(spec->dim(), 0.0);
    for (const auto& r : reports) {
        if (!(r.params.spec() == *spec)) throw StructuralError("fedavg_oracle: manifold mismatch");
        const double p = static_cast<double>(r.shard_size) / total;
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += p * r.params[k];
    }
    return ParamPoint(spec, std::move(mean));
}

}  // namespace a2g
