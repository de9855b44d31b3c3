#pragma once

#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace a2g {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Canonical angle in [-pi, pi).
double wrap_angle(double x) noexcept;

// Signed shortest arc in (-pi, pi]; the antipode maps to +pi.
double shortest_arc(double delta) noexcept;

// Product of circles and lines: coordinate k is on S^1 (period 2*pi) when
// angular_mask[k] is set, otherwise on the real line.
class ManifoldSpec {
public:
    explicit ManifoldSpec(std::vector<bool> angular_mask);

    static std::shared_ptr<const ManifoldSpec> euclidean(std::size_t dim);
    static std::shared_ptr<const ManifoldSpec> torus(std::size_t dim);
    static std::shared_ptr<const ManifoldSpec> mixed(std::vector<bool> angular_mask);

    [[nodiscard]] std::size_t dim() const noexcept { return mask_.size(); }
    [[nodiscard]] bool is_angular(std::size_t k) const { return mask_[k]; }
    [[nodiscard]] bool is_euclidean() const noexcept;
    [[nodiscard]] const std::vector<bool>& angular_mask() const noexcept { return mask_; }

    friend bool operator==(const ManifoldSpec&, const ManifoldSpec&) = default;

private:
    std::vector<bool> mask_;
};

using SpecPtr = std::shared_ptr<const ManifoldSpec>;

// A point on the manifold. Angular coordinates are canonicalized to
// [-pi, pi) on construction and on every mutation through set().
class ParamPoint {
public:
    ParamPoint(SpecPtr spec, std::vector<double> coords);

    [[nodiscard]] const ManifoldSpec& spec() const noexcept { return *spec_; }
    [[nodiscard]] const SpecPtr& spec_ptr() const noexcept { return spec_; }
    [[nodiscard]] std::size_t dim() const noexcept { return coords_.size(); }
    [[nodiscard]] std::span<const double> coords() const noexcept { return coords_; }
    [[nodiscard]] double operator[](std::size_t k) const { return coords_[k]; }

    void set(std::size_t k, double value);

    friend bool operator==(const ParamPoint& a, const ParamPoint& b) {
        return *a.spec_ == *b.spec_ && a.coords_ == b.coords_;
    }

private:
    SpecPtr spec_;
    std::vector<double> coords_;
};

struct TangentVec {
    SpecPtr spec;
    std::vector<double> coords;
};

// Additive displacement of the base point's coordinates.
struct CorrectionVec {
    std::vector<double> coords;
};

TangentVec log_map(const ParamPoint& base, const ParamPoint& target);
ParamPoint exp_map(const ParamPoint& base, const TangentVec& tangent);

// v = sum_i w_i * Log_base(client_i). Weights must be nonnegative and sum to 1.
TangentVec weighted_tangent_average(const ParamPoint& base, std::span<const ParamPoint> clients,
                                    std::span<const double> weights);

// Psi = Exp_base(v) - base, with angular differences reported as shortest arcs,
// so that base + Psi re-canonicalizes to Exp_base(v).
CorrectionVec geometry_correction(const ParamPoint& base, std::span<const ParamPoint> clients,
                                  std::span<const double> weights);

// rho = max_i || Log_base(client_i) ||_2
double dispersion(const ParamPoint& base, std::span<const ParamPoint> clients);

double l2_norm(std::span<const double> v) noexcept;

}  // namespace a2g
