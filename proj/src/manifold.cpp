#include "a2g/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "a2g/errors.hpp"

namespace a2g {

double wrap_angle(double x) noexcept {
    double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
    // floor() can land one period off when x + pi rounds onto a multiple of 2*pi.
    if (r >= kPi) r -= kTwoPi;
    if (r < -kPi) r += kTwoPi;
    return r;
}

double shortest_arc(double delta) noexcept { return -wrap_angle(-delta); }

ManifoldSpec::ManifoldSpec(std::vector<bool> angular_mask) : mask_(std::move(angular_mask)) {
    if (mask_.empty()) throw StructuralError("manifold dimension must be positive");
}

std::shared_ptr<const ManifoldSpec> ManifoldSpec::euclidean(std::size_t dim) {
    return std::make_shared<const ManifoldSpec>(std::vector<bool>(dim, false));
}

std::shared_ptr<const ManifoldSpec> ManifoldSpec::torus(std::size_t dim) {
    return std::make_shared<const ManifoldSpec>(std::vector<bool>(dim, true));
}

std::shared_ptr<const ManifoldSpec> ManifoldSpec::mixed(std::vector<bool> angular_mask) {
    return std::make_shared<const ManifoldSpec>(std::move(angular_mask));
}

bool ManifoldSpec::is_euclidean() const noexcept {
    return std::none_of(mask_.begin(), mask_.end(), [](bool a) { return a; });
}

ParamPoint::ParamPoint(SpecPtr spec, std::vector<double> coords)
    : spec_(std::move(spec)), coords_(std::move(coords)) {
    if (!spec_) throw StructuralError("ParamPoint requires a manifold spec");
    if (coords_.size() != spec_->dim()) {
        throw StructuralError("ParamPoint has " + std::to_string(coords_.size()) +
                              " coordinates, manifold dimension is " +
                              std::to_string(spec_->dim()));
    }
    for (std::size_t k = 0; k < coords_.size(); ++k) {
        if (spec_->is_angular(k)) coords_[k] = wrap_angle(coords_[k]);
    }
}

void ParamPoint::set(std::size_t k, double value) {
    coords_.at(k) = spec_->is_angular(k) ? wrap_angle(value) : value;
}

namespace {

void require_same_spec(const ManifoldSpec& a, const ManifoldSpec& b, const char* where) {
    if (!(a == b)) throw StructuralError(std::string(where) + ": manifold spec mismatch");
}

void require_clients(const ParamPoint& base, std::span<const ParamPoint> clients,
                     const char* where) {
    if (clients.empty()) throw StructuralError(std::string(where) + ": empty client list");
    for (const auto& c : clients) require_same_spec(base.spec(), c.spec(), where);
}

}  // namespace

TangentVec log_map(const ParamPoint& base, const ParamPoint& target) {
    require_same_spec(base.spec(), target.spec(), "log_map");
    const auto& spec = base.spec();
    std::vector<double> v(base.dim());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double d = target[k] - base[k];
        v[k] = spec.is_angular(k) ? shortest_arc(d) : d;
    }
    return {base.spec_ptr(), std::move(v)};
}

ParamPoint exp_map(const ParamPoint& base, const TangentVec& tangent) {
    if (tangent.coords.size() != base.dim()) {
        throw StructuralError("exp_map: tangent dimension mismatch");
    }
    if (tangent.spec) require_same_spec(base.spec(), *tangent.spec, "exp_map");
    std::vector<double> out(base.dim());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = base[k] + tangent.coords[k];
    return ParamPoint(base.spec_ptr(), std::move(out));
}

TangentVec weighted_tangent_average(const ParamPoint& base, std::span<const ParamPoint> clients,
                                    std::span<const double> weights) {
    require_clients(base, clients, "weighted_tangent_average");
    if (weights.size() != clients.size()) {
        throw StructuralError("weighted_tangent_average: weight count != client count");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw StructuralError("weighted_tangent_average: weights must be finite and >= 0");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw StructuralError("weighted_tangent_average: weights sum to " +
                              std::to_string(total) + ", expected 1");
    }

    std::vector<double> v(base.dim(), 0.0);
    for (std::size_t i = 0; i < clients.size(); ++i) {
        const TangentVec t = log_map(base, clients[i]);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += weights[i] * t.coords[k];
    }
    return {base.spec_ptr(), std::move(v)};
}

CorrectionVec geometry_correction(const ParamPoint& base, std::span<const ParamPoint> clients,
                                  std::span<const double> weights) {
    const TangentVec v = weighted_tangent_average(base, clients, weights);
    const ParamPoint moved = exp_map(base, v);
    const auto& spec = base.spec();
    std::vector<double> psi(base.dim());
    // On linear coordinates (base + v) - base == v; use v to avoid the rounding.
    for (std::size_t k = 0; k < psi.size(); ++k) {
        psi[k] = spec.is_angular(k) ? shortest_arc(moved[k] - base[k]) : v.coords[k];
    }
    return {std::move(psi)};
}

double dispersion(const ParamPoint& base, std::span<const ParamPoint> clients) {
    require_clients(base, clients, "dispersion");
    double rho = 0.0;
    for (const auto& c : clients) rho = std::max(rho, l2_norm(log_map(base, c).coords));
    return rho;
}

double l2_norm(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace a2g
