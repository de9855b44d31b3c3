#include "a2g/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "a2g/errors.hpp"

namespace a2g {

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p) - std::log1p(-p); }

double clamp_probability(double p) noexcept { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double binary_cross_entropy(double p, int label) noexcept {
    const double q = clamp_probability(p);
    return label == 1 ? -std::log(q) : -std::log1p(-q);
}

void CircuitSpec::validate() const {
    if (num_qubits < 1 || num_qubits > kMaxCircuitQubits) {
        throw StructuralError("circuit num_qubits must be in [1, " +
                              std::to_string(kMaxCircuitQubits) + "]");
    }
    if (num_layers < 1) throw StructuralError("circuit num_layers must be >= 1");
    if (readout_qubit >= num_qubits) throw StructuralError("circuit readout_qubit out of range");
}

StateVector encode_features(std::span<const double> x, const CircuitSpec& spec) {
    spec.validate();
    if (x.size() > spec.num_qubits) {
        throw StructuralError("encode_features: " + std::to_string(x.size()) +
                              " features exceed " + std::to_string(spec.num_qubits) + " qubits");
    }
    StateVector psi(spec.num_qubits);
    for (std::size_t j = 0; j < x.size(); ++j) psi.apply_ry(static_cast<unsigned>(j), x[j]);
    return psi;
}

double circuit_forward(const ParamPoint& params, std::span<const double> x,
                       const CircuitSpec& spec) {
    const std::size_t n_angles = spec.angle_count();
    if (params.dim() != n_angles && params.dim() != n_angles + 1) {
        throw StructuralError("circuit_forward: expected " + std::to_string(n_angles) +
                              " angles (+ optional bias), got " + std::to_string(params.dim()));
    }
    StateVector psi = encode_features(x, spec);
    const unsigned n = spec.num_qubits;
    std::size_t k = 0;
    for (unsigned layer = 0; layer < spec.num_layers; ++layer) {
        for (unsigned q = 0; q < n; ++q) {
            psi.apply_ry(q, params[k++]);
            psi.apply_rz(q, params[k++]);
        }
        if (n > 1) {
            for (unsigned q = 0; q < n; ++q) psi.apply_cnot(q, (q + 1) % n);
        }
    }
    const double p = std::clamp(psi.probability_one(spec.readout_qubit), 0.0, 1.0);
    if (params.dim() == n_angles) return p;
    return sigmoid(logit(clamp_probability(p)) + params[n_angles]);
}

double logistic_surrogate_forward(const ParamPoint& params, std::span<const double> x) {
    if (params.dim() != x.size() + 1) {
        throw StructuralError("logistic_surrogate_forward: expected " +
                              std::to_string(x.size() + 1) + " parameters, got " +
                              std::to_string(params.dim()));
    }
    double z = params[x.size()];
    for (std::size_t j = 0; j < x.size(); ++j) z += params[j] * x[j];
    return sigmoid(z);
}

Classifier::Classifier(LogisticSurrogate m) : model_(m) {
    if (m.input_dim == 0) throw StructuralError("surrogate input_dim must be positive");
    manifold_ = ManifoldSpec::euclidean(m.input_dim + 1);
}

Classifier::Classifier(VariationalCircuit m) : model_(m) {
    m.circuit.validate();
    std::vector<bool> mask(m.circuit.angle_count(), true);
    if (m.bias) mask.push_back(false);
    manifold_ = ManifoldSpec::mixed(std::move(mask));
}

std::size_t Classifier::input_dim() const noexcept {
    if (const auto* s = std::get_if<LogisticSurrogate>(&model_)) return s->input_dim;
    return std::get<VariationalCircuit>(model_).circuit.num_qubits;
}

bool Classifier::is_surrogate() const noexcept {
    return std::holds_alternative<LogisticSurrogate>(model_);
}

double Classifier::predict(const ParamPoint& params, std::span<const double> x) const {
    if (const auto* c = std::get_if<VariationalCircuit>(&model_)) {
        return circuit_forward(params, x, c->circuit);
    }
    return logistic_surrogate_forward(params, x);
}

double bce_loss(const Classifier& model, const ParamPoint& params, const Dataset& batch) {
    if (batch.empty()) throw StructuralError("bce_loss: empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        total += binary_cross_entropy(model.predict(params, batch.row(i)), batch.labels[i]);
    }
    return total / static_cast<double>(batch.size());
}

}  // namespace a2g
