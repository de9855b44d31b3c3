#include "a2g/selftest.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <vector>

#include "a2g/aggregation.hpp"
#include "a2g/channel.hpp"
#include "a2g/manifold.hpp"
#include "a2g/model.hpp"
#include "a2g/optimizer.hpp"
#include "a2g/rng.hpp"
#include "a2g/statevector.hpp"

namespace a2g {

namespace {

constexpr std::uint64_t kSeed = 20240531;

// Each check returns an empty string on success, otherwise a failure detail.
using Check = std::string (*)(const SelftestHooks&);

std::string check_manifold(const SelftestHooks&) {
    RngStream rng(kSeed, {StreamPurpose::test, 1, 0});
    const auto spec = ManifoldSpec::mixed({true, true, false, true});
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> a(4), b(4);
        for (std::size_t k = 0; k < 4; ++k) {
            a[k] = rng.uniform(-10.0, 10.0);
            b[k] = rng.uniform(-10.0, 10.0);
        }
        const ParamPoint base(spec, a), target(spec, b);
        const TangentVec v = log_map(base, target);
        for (std::size_t k = 0; k < 4; ++k) {
            if (spec->is_angular(k) && !(v.coords[k] > -kPi && v.coords[k] <= kPi)) {
                return "log coordinate outside (-pi, pi]";
            }
        }
        const ParamPoint back = exp_map(base, v);
        for (std::size_t k = 0; k < 4; ++k) {
            const double err = spec->is_angular(k) ? std::abs(shortest_arc(back[k] - target[k]))
                                                   : std::abs(back[k] - target[k]);
            if (err > 1e-9) return "exp(log) round trip error " + std::to_string(err);
        }
    }
    return {};
}

std::string check_qos(const SelftestHooks& hooks) {
    RngStream rng(kSeed, {StreamPurpose::test, 2, 0});
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 2 + rng.below(7);
        std::vector<QosSample> samples(k);
        for (auto& s : samples) {
            s.fidelity = rng.uniform(0.05, 1.0);
            s.latency = rng.uniform(0.0, 2.0);
            s.instability = rng.uniform(0.0, 5.0);
        }
        const double alpha = rng.uniform(0.0, 3.0);
        const std::vector<std::size_t> sizes(k, 1);
        const TrustWeights got = hooks.weights(samples, sizes, {alpha, alpha, alpha, 1e-8});
        const TrustWeights want = reduced_weights(samples, alpha, 1e-8);
        if (got.weights.size() != k) return "wrong number of weights";
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (!(got.weights[i] >= 0.0)) return "negative weight";
            if (std::abs(got.weights[i] - want.weights[i]) > 1e-12) {
                return "weights disagree with the QoS-only reduction";
            }
            sum += got.weights[i];
        }
        if (std::abs(sum - 1.0) > 1e-12) return "weights do not sum to 1";
    }
    return {};
}

std::string check_fedavg(const SelftestHooks&) {
    RngStream rng(kSeed, {StreamPurpose::test, 3, 0});
    const AggregationConfig cfg{0.0, 1.0, {}};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + rng.below(6);
        const std::size_t d = 1 + rng.below(8);
        const auto spec = ManifoldSpec::euclidean(d);
        std::vector<double> g(d);
        for (auto& x : g) x = rng.uniform(-5.0, 5.0);
        const ParamPoint global(spec, g);
        std::vector<ClientReport> reports;
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<double> c(d);
            for (auto& x : c) x = rng.uniform(-5.0, 5.0);
            QosSample q{rng.uniform(0.1, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
            reports.push_back({i, ParamPoint(spec, c), std::nullopt, q, 1 + rng.below(200)});
        }
        const ParamPoint next = a2g_update(global, reports, cfg).next;
        const ParamPoint oracle = fedavg_oracle(reports);
        for (std::size_t j = 0; j < d; ++j) {
            if (std::abs(next[j] - oracle[j]) > 1e-12) return "A2G baseline differs from FedAvg";
        }
    }
    return {};
}

std::string check_spsa(const SelftestHooks&) {
    // For a 1-D quadratic the two-sided difference equals the derivative.
    const auto line = ManifoldSpec::euclidean(1);
    const LossFn f1 = [](const ParamPoint& p) { return 3.0 * (p[0] - 1.5) * (p[0] - 1.5); };
    RngStream rng(kSeed, {StreamPurpose::test, 4, 0});
    for (double x : {-2.0, 0.0, 0.7, 4.0}) {
        const auto est = spsa_gradient(f1, ParamPoint(line, {x}), 0.1, rng);
        if (std::abs(est.gradient[0] - 6.0 * (x - 1.5)) > 1e-9) return "1-D quadratic gradient not exact";
    }

    const auto space = ManifoldSpec::euclidean(4);
    const std::vector<double> opt{1.0, -0.5, 0.25, 2.0};
    const LossFn f4 = [&](const ParamPoint& p) {
        double s = 0.0;
        for (std::size_t k = 0; k < 4; ++k) s += (p[k] - opt[k]) * (p[k] - opt[k]);
        return s;
    };
    SpsaConfig cfg;
    cfg.steps_per_round = 300;
    RngStream train(kSeed, {StreamPurpose::test, 4, 1});
    const auto result = local_train(ParamPoint(space, {0, 0, 0, 0}), f4, cfg, train);
    double dist = 0.0;
    for (std::size_t k = 0; k < 4; ++k) dist += (result.params[k] - opt[k]) * (result.params[k] - opt[k]);
    if (std::sqrt(dist) >= 0.1) return "4-D quadratic not solved, distance " + std::to_string(std::sqrt(dist));
    return {};
}

std::string check_model(const SelftestHooks&) {
    RngStream rng(kSeed, {StreamPurpose::test, 5, 0});
    for (double t : {0.0, 0.3, 1.7, -2.9}) {
        StateVector sv(1);
        sv.apply_ry(0, t);
        if (std::abs(sv.probability_one(0) - std::sin(t / 2) * std::sin(t / 2)) > 1e-12) {
            return "RY probability mismatch";
        }
    }
    StateVector sv(4);
    for (int g = 0; g < 500; ++g) {
        const auto q = static_cast<unsigned>(rng.below(4));
        switch (rng.below(3)) {
            case 0: sv.apply_ry(q, rng.uniform(-kPi, kPi)); break;
            case 1: sv.apply_rz(q, rng.uniform(-kPi, kPi)); break;
            default: sv.apply_cnot(q, (q + 1) % 4); break;
        }
    }
    if (std::abs(sv.norm_squared() - 1.0) > 1e-10) return "statevector norm drift";

    const CircuitSpec spec{3, 2, 0};
    const Classifier model{VariationalCircuit{spec, false}};
    std::vector<double> theta(model.parameter_count());
    for (auto& t : theta) t = rng.uniform(-kPi, kPi);
    const std::vector<double> x{0.4, -1.1, 0.9};
    const double p0 = model.predict(ParamPoint(model.manifold(), theta), x);
    for (std::size_t k = 0; k < theta.size(); ++k) {
        auto shifted = theta;
        shifted[k] += kTwoPi;
        if (std::abs(model.predict(ParamPoint(model.manifold(), shifted), x) - p0) > 1e-9) {
            return "forward pass not 2*pi periodic";
        }
    }
    return {};
}

std::string check_channel(const SelftestHooks&) {
    ChannelConfig cfg;
    cfg.flip_prob = 0.06;
    constexpr int n = 2000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(kSeed, {StreamPurpose::fidelity, 0, static_cast<std::uint64_t>(i)});
        sum += sample_fidelity(cfg, rng);
    }
    const double p = cfg.flip_prob;
    const double se = std::sqrt(p * (1 - p) / (static_cast<double>(cfg.trials_per_round) * n));
    if (std::abs(sum / n - (1 - p)) > 3 * se) return "fidelity mean outside 3 standard errors";
    return {};
}

}  // namespace

bool run_selftest(std::ostream& out, const SelftestHooks& hooks) {
    struct Group {
        const char* name;
        Check check;
    };
    static constexpr Group groups[] = {
        {"manifold", check_manifold}, {"qos", check_qos},     {"fedavg", check_fedavg},
        {"spsa", check_spsa},         {"model", check_model}, {"channel", check_channel},
    };

    bool ok = true;
    for (const auto& g : groups) {
        const auto start = std::chrono::steady_clock::now();
        std::string failure;
        try {
            failure = g.check(hooks);
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (failure.empty()) {
            out << "PASS " << g.name << " (" << static_cast<long>(ms) << " ms)\n";
        } else {
            out << "FAIL " << g.name << ": " << failure << '\n';
            ok = false;
        }
    }
    return ok;
}

}  // namespace a2g
