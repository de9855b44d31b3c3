#include "a2g/optimizer.hpp"

#include <cmath>
#include <string>

#include "a2g/errors.hpp"

namespace a2g {

double SpsaConfig::resolved_offset() const noexcept {
    return stability_offset < 0.0 ? 0.1 * static_cast<double>(steps_per_round) : stability_offset;
}

double SpsaConfig::step_size(std::size_t k) const noexcept {
    return a0 / std::pow(static_cast<double>(k) + 1.0 + resolved_offset(), alpha_exp);
}

double SpsaConfig::perturbation(std::size_t k) const noexcept {
    return c0 / std::pow(static_cast<double>(k) + 1.0, gamma_exp);
}

void SpsaConfig::validate() const {
    if (!(a0 > 0.0)) throw StructuralError("spsa a0 must be positive");
    if (!(c0 > 0.0)) throw StructuralError("spsa c0 must be positive");
    if (!(alpha_exp > 0.0 && alpha_exp <= 1.0)) throw StructuralError("spsa alpha_exp must lie in (0, 1]");
    if (!(gamma_exp > 0.0 && gamma_exp <= 1.0)) throw StructuralError("spsa gamma_exp must lie in (0, 1]");
}

SpsaEstimate spsa_gradient(const LossFn& loss, const ParamPoint& params, double c_k,
                           RngStream& rng) {
    if (!(c_k > 0.0)) throw StructuralError("spsa_gradient: c_k must be positive");
    const std::size_t d = params.dim();
    std::vector<double> delta(d);
    for (auto& v : delta) v = rng.rademacher();

    std::vector<double> plus(d);
    std::vector<double> minus(d);
    for (std::size_t j = 0; j < d; ++j) {
        plus[j] = params[j] + c_k * delta[j];
        minus[j] = params[j] - c_k * delta[j];
    }
    SpsaEstimate est;
    est.loss_plus = loss(ParamPoint(params.spec_ptr(), std::move(plus)));
    est.loss_minus = loss(ParamPoint(params.spec_ptr(), std::move(minus)));
    if (!std::isfinite(est.loss_plus) || !std::isfinite(est.loss_minus)) {
        throw DivergenceError("spsa_gradient: non-finite loss");
    }
    const double diff = est.loss_plus - est.loss_minus;
    est.gradient.resize(d);
    for (std::size_t j = 0; j < d; ++j) est.gradient[j] = diff / (2.0 * c_k * delta[j]);
    return est;
}

LocalTrainResult local_train(const ParamPoint& start, const LossFn& loss, const SpsaConfig& cfg,
                             RngStream& rng) {
    cfg.validate();
    LocalTrainResult out{start, {}, {}};
    out.loss_history.reserve(cfg.steps_per_round);
    for (std::size_t k = 0; k < cfg.steps_per_round; ++k) {
        SpsaEstimate est;
        try {
            est = spsa_gradient(loss, out.params, cfg.perturbation(k), rng);
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " at SPSA step " + std::to_string(k));
        }
        const double a_k = cfg.step_size(k);
        for (std::size_t j = 0; j < out.params.dim(); ++j) {
            const double next = out.params[j] - a_k * est.gradient[j];
            if (!std::isfinite(next)) {
                throw DivergenceError("local_train: parameter " + std::to_string(j) +
                                      " became non-finite at SPSA step " + std::to_string(k));
            }
            out.params.set(j, next);
        }
        out.loss_history.push_back(0.5 * (est.loss_plus + est.loss_minus));
        out.gradient = std::move(est.gradient);
    }
    return out;
}

LocalTrainResult local_train(const ParamPoint& start, const Classifier& model,
                             const Dataset& shard, const SpsaConfig& cfg, RngStream& rng) {
    if (shard.empty()) throw StructuralError("local_train: empty shard");
    return local_train(
        start, [&](const ParamPoint& p) { return bce_loss(model, p, shard); }, cfg, rng);
}

}  // namespace a2g
