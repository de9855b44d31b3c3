#include <doctest.h>

#include <cmath>
#include <vector>

#include "a2g/errors.hpp"
#include "a2g/model.hpp"
#include "a2g/rng.hpp"
#include "a2g/statevector.hpp"
#include "oracles.hpp"

using namespace a2g;

namespace {

void check_same(const StateVector& sv, const oracle::Vector& want, double tol) {
    const auto amps = sv.amplitudes();
    REQUIRE(amps.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(amps[i] - want[i]) <= tol);
}

}  // namespace

TEST_CASE("gates match dense matrices on every basis state") {
    RngStream rng(21, {StreamPurpose::test, 0, 0});
    for (unsigned n = 1; n <= 4; ++n) {
        for (std::size_t idx = 0; idx < (std::size_t{1} << n); ++idx) {
            for (unsigned q = 0; q < n; ++q) {
                const double t = rng.uniform(-4.0, 4.0);
                StateVector a = StateVector::basis(n, idx);
                a.apply_ry(q, t);
                check_same(a, oracle::matvec(oracle::embed(oracle::ry(t), n, q), oracle::basis(n, idx)), 1e-12);
                StateVector b = StateVector::basis(n, idx);
                b.apply_rz(q, t);
                check_same(b, oracle::matvec(oracle::embed(oracle::rz(t), n, q), oracle::basis(n, idx)), 1e-12);
                for (unsigned r = 0; r < n; ++r) {
                    if (r == q) continue;
                    StateVector c = StateVector::basis(n, idx);
                    c.apply_cnot(q, r);
                    check_same(c, oracle::matvec(oracle::cnot(n, q, r), oracle::basis(n, idx)), 1e-12);
                }
            }
        }
    }
    StateVector s(2);
    CHECK_THROWS_AS(s.apply_cnot(1, 1), StructuralError);
    CHECK_THROWS_AS(s.apply_ry(2, 0.1), StructuralError);
}

TEST_CASE("norm is preserved over a long random program") {
    RngStream rng(22, {StreamPurpose::test, 0, 0});
    StateVector s(5);
    for (int g = 0; g < 1000; ++g) {
        const auto q = static_cast<unsigned>(rng.below(5));
        switch (rng.below(3)) {
            case 0: s.apply_ry(q, rng.uniform(-7, 7)); break;
            case 1: s.apply_rz(q, rng.uniform(-7, 7)); break;
            default: s.apply_cnot(q, (q + 1 + static_cast<unsigned>(rng.below(4))) % 5); break;
        }
        CHECK(std::abs(s.norm_squared() - 1.0) < 1e-10);
    }
}

TEST_CASE("encode_features examples") {
    const CircuitSpec spec{3, 1, 0};
    const std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK(encode_features(zero, spec).probability_one(0) == 0.0);
    CHECK(std::abs(encode_features(zero, spec).amplitudes()[0] - 1.0) < 1e-15);

    const CircuitSpec one{1, 1, 0};
    const std::vector<double> pi{kPi};
    CHECK(std::norm(encode_features(pi, one).amplitudes()[1]) == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<double> x{0.3, -1.2};
    const auto s = encode_features(x, spec);
    CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.probability_one(2) == 0.0);
    CHECK_THROWS_AS(encode_features(std::vector<double>{1, 2, 3, 4}, spec), StructuralError);
}

TEST_CASE("circuit forward examples and oracle agreement") {
    const CircuitSpec one{1, 1, 0};
    const Classifier m1{VariationalCircuit{one, false}};
    const std::vector<double> x0{0.0};
    CHECK(m1.predict(ParamPoint(m1.manifold(), {0.0, 0.0}), x0) == 0.0);
    CHECK(m1.predict(ParamPoint(m1.manifold(), {kPi, 0.0}), x0) == doctest::Approx(1.0).epsilon(1e-15));

    RngStream rng(23, {StreamPurpose::test, 0, 0});
    for (unsigned n = 1; n <= 4; ++n) {
        for (unsigned layers = 1; layers <= 3; ++layers) {
            const CircuitSpec spec{n, layers, n - 1};
            const Classifier m{VariationalCircuit{spec, false}};
            CHECK(m.parameter_count() == spec.angle_count());
            for (int trial = 0; trial < 10; ++trial) {
                std::vector<double> theta(spec.angle_count()), x(n);
                for (auto& t : theta) t = rng.uniform(-kPi, kPi);
                for (auto& v : x) v = rng.uniform(-2, 2);
                const double got = m.predict(ParamPoint(m.manifold(), theta), x);
                CHECK(got >= 0.0);
                CHECK(got <= 1.0);
                CHECK(got == doctest::Approx(oracle::circuit_probability(theta, x, n, layers, n - 1)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("circuit bias and manifold layout") {
    const CircuitSpec spec{2, 1, 0};
    const Classifier m{VariationalCircuit{spec, true}};
    REQUIRE(m.parameter_count() == 5);
    for (std::size_t k = 0; k < 4; ++k) CHECK(m.manifold()->is_angular(k));
    CHECK_FALSE(m.manifold()->is_angular(4));

    const std::vector<double> theta{0.4, 0.1, -0.7, 1.1};
    const std::vector<double> x{0.2, 0.9};
    const double p = oracle::circuit_probability(theta, x, 2, 1, 0);
    auto with_bias = theta;
    with_bias.push_back(0.8);
    CHECK(m.predict(ParamPoint(m.manifold(), with_bias), x) ==
          doctest::Approx(oracle::sigmoid(std::log(p / (1 - p)) + 0.8)).epsilon(1e-12));
}

TEST_CASE("forward is 2*pi periodic in every angle") {
    RngStream rng(24, {StreamPurpose::test, 0, 0});
    const Classifier m{VariationalCircuit{CircuitSpec{4, 2, 1}, true}};
    std::vector<double> theta(m.parameter_count());
    for (auto& t : theta) t = rng.uniform(-kPi, kPi);
    const std::vector<double> x{0.1, -0.5, 1.4, 0.3};
    const double base = circuit_forward(ParamPoint(m.manifold(), theta), x, CircuitSpec{4, 2, 1});
    for (std::size_t k = 0; k + 1 < theta.size(); ++k) {
        for (double shift : {kTwoPi, -kTwoPi, 2 * kTwoPi}) {
            auto t = theta;
            t[k] += shift;
            // Evaluate on a Euclidean chart so the shift is not removed by canonicalization.
            const ParamPoint raw(ManifoldSpec::euclidean(t.size()), t);
            CHECK(circuit_forward(raw, x, CircuitSpec{4, 2, 1}) == doctest::Approx(base).epsilon(1e-9));
        }
    }
}

TEST_CASE("surrogate examples") {
    const Classifier m{LogisticSurrogate{1}};
    const std::vector<double> x0{0.0}, x1{1.0};
    CHECK(m.predict(ParamPoint(m.manifold(), {0.0, 0.0}), x0) == 0.5);
    CHECK(m.predict(ParamPoint(m.manifold(), {1.0, 0.0}), x0) == 0.5);
    CHECK(m.predict(ParamPoint(m.manifold(), {2.0, -1.0}), x1) == doctest::Approx(0.7310585786300049));
    CHECK(m.manifold()->is_euclidean());
    CHECK_THROWS_AS(logistic_surrogate_forward(ParamPoint(m.manifold(), {1.0, 0.0}), std::vector<double>{1, 2}),
                    StructuralError);
}

TEST_CASE("bce examples") {
    CHECK(binary_cross_entropy(1.0, 1) == doctest::Approx(-std::log(1 - 1e-7)));
    CHECK(binary_cross_entropy(0.0, 0) == doctest::Approx(-std::log(1 - 1e-7)));
    CHECK(binary_cross_entropy(0.0, 1) == doctest::Approx(-std::log(1e-7)));

    const Classifier m{LogisticSurrogate{2}};
    Dataset batch;
    batch.features = FeatureMatrix(4, 2);
    batch.features << 1, 2, -1, 0, 3, 3, 0.5, -2;
    batch.labels = {1, 0, 0, 1};
    const ParamPoint zero(m.manifold(), {0, 0, 0});
    CHECK(bce_loss(m, zero, batch) == doctest::Approx(std::log(2.0)));

    const ParamPoint p(m.manifold(), {0.3, -0.8, 0.1});
    const std::size_t order[] = {3, 1, 0, 2};
    CHECK(bce_loss(m, p, batch.subset(order)) == doctest::Approx(bce_loss(m, p, batch)).epsilon(1e-14));
    CHECK_THROWS_AS(bce_loss(m, p, Dataset{FeatureMatrix(0, 2), {}}), StructuralError);
}
