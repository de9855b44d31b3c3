#include "a2g/statevector.hpp"

#include <cmath>
#include <string>

#include "a2g/errors.hpp"

namespace a2g {

inline constexpr unsigned kMaxQubits = 16;

StateVector::StateVector(unsigned num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits == 0 || num_qubits > kMaxQubits) {
        throw StructuralError("StateVector: qubit count must be in [1, " +
                              std::to_string(kMaxQubits) + "]");
    }
    amps_.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::basis(unsigned num_qubits, std::size_t index) {
    StateVector s(num_qubits);
    if (index >= s.amps_.size()) throw StructuralError("StateVector::basis: index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

double StateVector::norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

void StateVector::check_qubit(unsigned q) const {
    if (q >= num_qubits_) throw StructuralError("StateVector: qubit index out of range");
}

void StateVector::apply_ry(unsigned qubit, double theta) {
    check_qubit(qubit);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        const Amplitude a0 = amps_[i];
        const Amplitude a1 = amps_[i | bit];
        amps_[i] = c * a0 - s * a1;
        amps_[i | bit] = s * a0 + c * a1;
    }
}

void StateVector::apply_rz(unsigned qubit, double theta) {
    check_qubit(qubit);
    const Amplitude phase0 = std::polar(1.0, -0.5 * theta);
    const Amplitude phase1 = std::polar(1.0, 0.5 * theta);
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] *= (i & bit) ? phase1 : phase0;
}

void StateVector::apply_cnot(unsigned control, unsigned target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw StructuralError("CNOT: control and target must differ");
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
    }
}

double StateVector::probability_one(unsigned qubit) const {
    check_qubit(qubit);
    const std::size_t bit = std::size_t{1} << qubit;
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) p += std::norm(amps_[i]);
    }
    return p;
}

}  // namespace a2g
