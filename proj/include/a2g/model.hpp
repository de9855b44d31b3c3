#pragma once

#include <cstddef>
#include <span>
#include <variant>

#include "a2g/data.hpp"
#include "a2g/manifold.hpp"
#include "a2g/statevector.hpp"

namespace a2g {

inline constexpr double kProbClamp = 1e-7;
inline constexpr unsigned kMaxCircuitQubits = 8;

double sigmoid(double z) noexcept;
double logit(double p) noexcept;
// Clamps p to [kProbClamp, 1 - kProbClamp].
double clamp_probability(double p) noexcept;
double binary_cross_entropy(double p, int label) noexcept;

// Hardware-efficient ansatz: per layer, RY then RZ on every qubit followed by
// a CNOT ring j -> (j + 1) mod n (omitted for a single qubit).
struct CircuitSpec {
    unsigned num_qubits = 4;
    unsigned num_layers = 2;
    unsigned readout_qubit = 0;

    // Two angles per qubit per layer; angle index 2 * (layer * n + q) is the
    // RY angle, the next one the RZ angle.
    [[nodiscard]] std::size_t angle_count() const noexcept {
        return 2u * static_cast<std::size_t>(num_qubits) * num_layers;
    }
    void validate() const;
};

// RY(x_j) on qubit j starting from |0...0>.
StateVector encode_features(std::span<const double> x, const CircuitSpec& spec);

// P(readout = 1). With a trailing linear bias coordinate b, returns
// sigmoid(logit(clamp(P)) + b) instead.
double circuit_forward(const ParamPoint& params, std::span<const double> x,
                       const CircuitSpec& spec);

// sigmoid(w . x + b); params are (w, b), all linear.
double logistic_surrogate_forward(const ParamPoint& params, std::span<const double> x);

struct LogisticSurrogate {
    std::size_t input_dim = 0;
};

struct VariationalCircuit {
    CircuitSpec circuit;
    bool bias = true;
};

// The client model: a parameter manifold plus a forward pass.
class Classifier {
public:
    explicit Classifier(LogisticSurrogate m);
    explicit Classifier(VariationalCircuit m);

    [[nodiscard]] const SpecPtr& manifold() const noexcept { return manifold_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return manifold_->dim(); }
    [[nodiscard]] std::size_t input_dim() const noexcept;
    [[nodiscard]] bool is_surrogate() const noexcept;

    [[nodiscard]] double predict(const ParamPoint& params, std::span<const double> x) const;

private:
    std::variant<LogisticSurrogate, VariationalCircuit> model_;
    SpecPtr manifold_;
};

// Mean binary cross-entropy over the batch.
double bce_loss(const Classifier& model, const ParamPoint& params, const Dataset& batch);

}  // namespace a2g
