#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace a2g {

// Dense n-qubit state. Qubit j is bit j of the basis-state index.
class StateVector {
public:
    using Amplitude = std::complex<double>;

    // |0...0>
    explicit StateVector(unsigned num_qubits);

    static StateVector basis(unsigned num_qubits, std::size_t index);

    [[nodiscard]] unsigned num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] double norm_squared() const noexcept;

    // RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
    void apply_ry(unsigned qubit, double theta);
    // RZ(t) = diag(e^{-i t/2}, e^{i t/2})
    void apply_rz(unsigned qubit, double theta);
    void apply_cnot(unsigned control, unsigned target);

    // Probability of reading 1 on the given qubit.
    [[nodiscard]] double probability_one(unsigned qubit) const;

private:
    void check_qubit(unsigned q) const;

    unsigned num_qubits_;
    std::vector<Amplitude> amps_;
};

}  // namespace a2g
