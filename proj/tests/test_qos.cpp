#include <doctest.h>

#include <cmath>
#include <vector>

#include "a2g/errors.hpp"
#include "a2g/qos.hpp"
#include "a2g/rng.hpp"

using namespace a2g;

namespace {

// Direct evaluation of the trust weight formula in long double.
std::vector<double> weights_oracle(const std::vector<QosSample>& s, const std::vector<std::size_t>& n,
                                   const QosGains& g) {
    long double total_n = 0;
    for (auto x : n) total_n += x;
    std::vector<long double> raw(s.size());
    long double total = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const long double q = std::pow((long double)s[i].fidelity, (long double)g.alpha) /
                              (std::pow((long double)s[i].latency + g.epsilon, (long double)g.gamma) *
                               std::pow((long double)s[i].instability + g.epsilon, (long double)g.delta));
        raw[i] = (n[i] / total_n) * q;
        total += raw[i];
    }
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) w[i] = static_cast<double>(raw[i] / total);
    return w;
}

std::vector<QosSample> random_samples(RngStream& rng, std::size_t k) {
    std::vector<QosSample> s(k);
    for (auto& x : s) x = {rng.uniform(0.02, 1.0), rng.uniform(0.001, 2.0), rng.uniform(0.0, 10.0)};
    return s;
}

double sum(const std::vector<double>& v) {
    double t = 0;
    for (double x : v) t += x;
    return t;
}

}  // namespace

TEST_CASE("qos_factor examples") {
    const QosSample s{0.3, 1.7, 4.0};
    CHECK(qos_factor(s, {0, 0, 0, 1e-8}) == 1.0);
    CHECK(qos_factor({0.8, 0.2, 0.5}, {1, 0, 0, 1e-8}) == doctest::Approx(0.8));
    CHECK(qos_factor({0.9, 0.5, 0.0}, {1, 1, 0, 1e-8}) == doctest::Approx(0.9 / 0.50000001).epsilon(1e-14));
    CHECK(qos_factor({0.9, 0.5, 0.0}, {1, 1, 0, 1e-8}) == doctest::Approx(1.8).epsilon(1e-6));
    CHECK_THROWS_AS(qos_factor({NAN, 0.5, 0.0}, {1, 1, 0, 1e-8}), StructuralError);
    CHECK_THROWS_AS(qos_factor({0.5, INFINITY, 0.0}, {1, 1, 0, 1e-8}), StructuralError);
}

TEST_CASE("trust_weights examples") {
    const std::vector<QosSample> three(3, QosSample{0.7, 0.1, 0.2});
    const std::vector<std::size_t> eq3{10, 10, 10};
    for (double w : trust_weights(three, eq3, {}).weights) CHECK(w == doctest::Approx(1.0 / 3));

    const std::vector<QosSample> two{{0.8, 0.1, 0.1}, {0.4, 0.1, 0.1}};
    const std::vector<std::size_t> skew{100, 300};
    const auto w = trust_weights(two, skew, {});
    CHECK(w.weights[0] == doctest::Approx(0.25));
    CHECK(w.weights[1] == doctest::Approx(0.75));

    const std::vector<std::size_t> eq2{50, 50};
    const auto wf = trust_weights(two, eq2, {1, 0, 0, 1e-8});
    CHECK(wf.weights[0] == doctest::Approx(2.0 / 3));
    CHECK(wf.weights[1] == doctest::Approx(1.0 / 3));

    CHECK_THROWS_AS(trust_weights(std::vector<QosSample>{}, std::vector<std::size_t>{}, {}), StructuralError);
    CHECK_THROWS_AS(trust_weights(two, eq3, {}), StructuralError);
}

TEST_CASE("underflow falls back to data-size weights") {
    const std::vector<QosSample> s{{1e-200, 1.0, 1.0}, {1e-200, 1.0, 1.0}};
    const std::vector<std::size_t> n{1, 3};
    const auto w = trust_weights(s, n, {3, 0, 0, 1e-8});
    CHECK(w.fallback);
    CHECK(w.weights[0] == doctest::Approx(0.25));
    CHECK(w.weights[1] == doctest::Approx(0.75));
}

TEST_CASE("reduced_weights examples") {
    const std::vector<QosSample> same(4, QosSample{0.6, 0.3, 0.2});
    for (double w : reduced_weights(same, 2.0, 1e-8).weights) CHECK(w == doctest::Approx(0.25));
    RngStream rng(3, {StreamPurpose::test, 0, 0});
    for (double w : reduced_weights(random_samples(rng, 5), 0.0, 1e-8).weights) CHECK(w == doctest::Approx(0.2));
}

TEST_CASE("trust_weights properties on random instances") {
    RngStream rng(11, {StreamPurpose::test, 0, 0});
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = 1 + rng.below(12);
        const auto s = random_samples(rng, k);
        std::vector<std::size_t> n(k);
        for (auto& x : n) x = 1 + rng.below(500);
        const QosGains g{rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3), 1e-8};

        const auto tw = trust_weights(s, n, g);
        const auto want = weights_oracle(s, n, g);
        CHECK(std::abs(sum(tw.weights) - 1.0) <= 1e-12);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(tw.weights[i] > 0.0);
            CHECK(tw.weights[i] == doctest::Approx(want[i]).epsilon(1e-12));
            CHECK(tw.weights[i] * tw.raw_scores[0] == doctest::Approx(tw.weights[0] * tw.raw_scores[i]).epsilon(1e-12));
        }

        // Reduction to the QoS-only weighting.
        const std::vector<std::size_t> ones(k, 1);
        const double a = g.alpha;
        const auto full = trust_weights(s, ones, {a, a, a, 1e-8});
        const auto red = reduced_weights(s, a, 1e-8);
        for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(full.weights[i] - red.weights[i]) < 1e-12);

        // Zero gains give exactly the shard-size proportions.
        const auto base = trust_weights(s, n, {});
        double total = 0;
        for (auto x : n) total += static_cast<double>(x);
        for (std::size_t i = 0; i < k; ++i) CHECK(base.weights[i] == doctest::Approx(n[i] / total).epsilon(1e-15));

        // Scale invariance: tau and s2 are untouched, fidelity scaled by c
        // multiplies every q by c^alpha.
        auto scaled = s;
        for (auto& x : scaled) x.fidelity *= 0.5;
        const auto ws = trust_weights(scaled, n, g);
        for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(ws.weights[i] - tw.weights[i]) <= 1e-12);

        if (k >= 2) {
            auto better = s;
            better[0].fidelity = std::min(1.0, s[0].fidelity * 1.5);
            if (better[0].fidelity > s[0].fidelity && g.alpha > 0.05) {
                const auto wb = trust_weights(better, n, g);
                CHECK(wb.weights[0] > tw.weights[0]);
                for (std::size_t i = 1; i < k; ++i) CHECK(wb.weights[i] < tw.weights[i]);
            }
            auto slower = s;
            slower[0].latency = s[0].latency * 2.0;
            if (g.gamma > 0.05) CHECK(trust_weights(slower, n, g).weights[0] < tw.weights[0]);
        }
    }
}

TEST_CASE("pairwise_sum") {
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}
