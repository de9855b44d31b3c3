#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "a2g/data.hpp"
#include "a2g/manifold.hpp"
#include "a2g/model.hpp"
#include "a2g/rng.hpp"

namespace a2g {

// SPSA gain schedule a_k = a0 / (k + 1 + A)^alpha_exp, c_k = c0 / (k + 1)^gamma_exp.
struct SpsaConfig {
    double a0 = 0.2;
    double c0 = 0.1;
    // A; a negative value means "10% of steps_per_round".
    double stability_offset = -1.0;
    double alpha_exp = 0.602;
    double gamma_exp = 0.101;
    std::size_t steps_per_round = 20;

    [[nodiscard]] double resolved_offset() const noexcept;
    [[nodiscard]] double step_size(std::size_t k) const noexcept;
    [[nodiscard]] double perturbation(std::size_t k) const noexcept;
    void validate() const;
};

using LossFn = std::function<double(const ParamPoint&)>;

struct SpsaEstimate {
    std::vector<double> gradient;
    double loss_plus = 0.0;
    double loss_minus = 0.0;
};

// Two-sided simultaneous-perturbation gradient estimate with a Rademacher
// direction. Perturbed points are canonicalized before evaluation.
// Throws DivergenceError on a non-finite loss.
SpsaEstimate spsa_gradient(const LossFn& loss, const ParamPoint& params, double c_k,
                           RngStream& rng);

struct LocalTrainResult {
    ParamPoint params;
    std::vector<double> gradient;      // last-step estimate; empty when no steps ran
    std::vector<double> loss_history;  // one entry per step: mean of the two probe losses
};

LocalTrainResult local_train(const ParamPoint& start, const LossFn& loss, const SpsaConfig& cfg,
                             RngStream& rng);

// Full-shard BCE objective for the given model.
LocalTrainResult local_train(const ParamPoint& start, const Classifier& model,
                             const Dataset& shard, const SpsaConfig& cfg, RngStream& rng);

}  // namespace a2g
