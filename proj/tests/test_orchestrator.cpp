#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "a2g/errors.hpp"
#include "a2g/orchestrator.hpp"

using namespace a2g;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.num_clients = 5;
    cfg.rounds = 6;
    cfg.data.synth_samples = 500;
    cfg.spsa.steps_per_round = 10;
    return cfg;
}

bool same_record(const RoundRecord& a, const RoundRecord& b) {
    return a.round == b.round && a.evaluated == b.evaluated && a.test_accuracy == b.test_accuracy &&
           a.global_loss == b.global_loss && a.weights == b.weights &&
           a.mean_fidelity == b.mean_fidelity && a.mean_latency == b.mean_latency &&
           a.mean_instability == b.mean_instability && a.dispersion == b.dispersion &&
           a.grad_norm == b.grad_norm;
}

}  // namespace

TEST_CASE("evaluate examples") {
    Dataset test;
    test.features = FeatureMatrix::Zero(6, 1);
    test.labels = {1, 1, 1, 1, 1, 1};
    const Classifier m{LogisticSurrogate{1}};
    const ParamPoint sure(m.manifold(), {0.0, std::log(0.99 / 0.01)});
    CHECK(evaluate(m, sure, test).accuracy == 1.0);

    test.labels = {1, 0, 0, 1, 0, 0};
    const ParamPoint half(m.manifold(), {0.0, 0.0});
    const auto ev = evaluate(m, half, test);
    CHECK(ev.accuracy == doctest::Approx(2.0 / 6));
    CHECK(ev.mean_loss == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(evaluate(m, half, Dataset{FeatureMatrix(0, 1), {}}), StructuralError);
}

TEST_CASE("prepare_experiment") {
    const auto cfg = small_config();
    const auto prep = prepare_experiment(cfg);
    CHECK(prep.test.size() == 100);
    CHECK(prep.train.size() == 400);
    REQUIRE(prep.shards.size() == 5);
    for (const auto& s : prep.shards) CHECK(s.size() == 80);
    CHECK(prep.model.is_surrogate());
    CHECK(prep.initial.dim() == 5);
    for (double v : prep.initial.coords()) CHECK(v == 0.0);

    auto circ = cfg;
    circ.model.kind = ModelKind::circuit;
    const auto cp = prepare_experiment(circ);
    CHECK(cp.initial.dim() == 17);
    for (std::size_t k = 0; k < 16; ++k) CHECK(std::abs(cp.initial[k]) <= kPi / 4);
    CHECK(cp.initial[16] == 0.0);
}

TEST_CASE("client_round examples") {
    auto cfg = small_config();
    cfg.spsa.steps_per_round = 0;
    cfg.channel.flip_prob = 0.0;
    const auto prep = prepare_experiment(cfg);
    const auto r = client_round(2, prep.initial, prep.shards[2], cfg, prep.model, 1);
    CHECK(r.params == prep.initial);
    CHECK(r.qos.fidelity == 1.0);
    CHECK(r.qos.instability == 0.0);
    CHECK_FALSE(r.grad.has_value());
    CHECK(r.shard_size == prep.shards[2].size());
    CHECK(r.client_id == 2);

    cfg = small_config();
    const auto prep2 = prepare_experiment(cfg);
    const auto a = client_round(1, prep2.initial, prep2.shards[1], cfg, prep2.model, 3);
    const auto b = client_round(1, prep2.initial, prep2.shards[1], cfg, prep2.model, 3);
    CHECK(a.params == b.params);
    CHECK(a.grad == b.grad);
    CHECK(a.qos.fidelity == b.qos.fidelity);
    CHECK(a.qos.latency == b.qos.latency);
    CHECK(a.qos.instability == b.qos.instability);
    CHECK(a.qos.latency <= cfg.channel.tau_max);
}

TEST_CASE("single client with beta 1 adopts the client's parameters") {
    auto cfg = small_config();
    cfg.num_clients = 1;
    FederatedRun run(cfg);
    const auto& prep = run.prepared();
    const auto expected = client_round(0, run.global(), prep.shards[0], cfg, prep.model, 1);
    const auto rec = run.run_round();
    CHECK(run.global() == expected.params);
    CHECK(rec.weights == std::vector<double>{1.0});
    CHECK(rec.round == 1);
}

TEST_CASE("record dispersion matches the round's reports") {
    auto cfg = small_config();
    cfg.aggregation.beta = 0.3;
    cfg.model.kind = ModelKind::circuit;
    FederatedRun run(cfg);
    const ParamPoint before = run.global();
    std::vector<ParamPoint> clients;
    for (std::size_t i = 0; i < cfg.num_clients; ++i) {
        clients.push_back(client_round(i, before, run.prepared().shards[i], cfg, run.prepared().model, 1).params);
    }
    const auto rec = run.run_round();
    CHECK(rec.dispersion == dispersion(before, clients));
    CHECK(rec.global_loss == doctest::Approx(bce_loss(run.prepared().model, run.global(), run.prepared().train)));
}

TEST_CASE("identical noiseless clients with equal shards get uniform weights") {
    auto cfg = small_config();
    cfg.channel.flip_prob = 0.0;
    cfg.aggregation.gains = {1.0, 0.0, 0.0, 1e-8};
    FederatedRun run(cfg);
    const auto rec = run.run_round();
    for (double w : rec.weights) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("telemetry is complete and weights sum to one") {
    auto cfg = small_config();
    cfg.aggregation = {0.0, 0.3, {1, 1, 1, 1e-8}};
    cfg.partition.scheme = PartitionScheme::label_skew;
    cfg.eval_every = 4;
    cfg.rounds = 9;
    const auto s = run_experiment(cfg);
    REQUIRE(s.records.size() == 9);
    for (std::size_t t = 0; t < 9; ++t) {
        const auto& r = s.records[t];
        CHECK(r.round == t + 1);
        CHECK(r.evaluated == ((t + 1) % 4 == 0 || t + 1 == 9));
        double sum = 0;
        for (double w : r.weights) sum += w;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(r.dispersion >= 0.0);
        CHECK(r.grad_norm >= 0.0);
        CHECK(r.test_accuracy >= 0.0);
        CHECK(r.test_accuracy <= 1.0);
    }
    // Rounds between evaluations carry the last value forward.
    CHECK(s.records[0].test_accuracy == 0.0);
    CHECK(s.records[4].test_accuracy == s.records[3].test_accuracy);
    CHECK(s.best_accuracy >= s.final_accuracy);
    CHECK(s.best_accuracy >= s.mean_accuracy_last5 - 1e-12);
    CHECK(s.final_accuracy == s.records.back().test_accuracy);
}

TEST_CASE("summarize") {
    std::vector<RoundRecord> recs(7);
    const double acc[] = {0.5, 0.9, 0.6, 0.7, 0.8, 0.75, 0.65};
    for (std::size_t i = 0; i < 7; ++i) {
        recs[i].round = i + 1;
        recs[i].evaluated = true;
        recs[i].test_accuracy = acc[i];
    }
    const auto s = summarize(recs);
    CHECK(s.epochs == 7);
    CHECK(s.best_accuracy == 0.9);
    CHECK(s.final_accuracy == 0.65);
    CHECK(s.mean_accuracy_last5 == doctest::Approx((0.6 + 0.7 + 0.8 + 0.75 + 0.65) / 5));
}

TEST_CASE("smoke run and determinism") {
    auto cfg = small_config();
    cfg.num_clients = 1;
    cfg.rounds = 1;
    CHECK(run_experiment(cfg).records.size() == 1);

    cfg = small_config();
    cfg.model.kind = ModelKind::circuit;
    cfg.aggregation = {0.0, 0.5, {1, 1, 1, 1e-8}};
    const auto a = run_experiment(cfg, {1});
    const auto b = run_experiment(cfg, {4});
    const auto c = run_experiment(cfg, {0});
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(same_record(a.records[i], b.records[i]));
        CHECK(same_record(a.records[i], c.records[i]));
    }
}

TEST_CASE("FedAvg baseline matches a standalone FedAvg loop") {
    auto cfg = small_config();
    cfg.rounds = 10;
    cfg.partition.scheme = PartitionScheme::quantity_skew;
    cfg.data.synth_samples = 1000;
    FederatedRun run(cfg);
    const auto& prep = run.prepared();

    // Plain FedAvg: local SPSA on every shard, then the shard-size weighted mean.
    std::vector<double> theta(prep.initial.coords().begin(), prep.initial.coords().end());
    for (std::size_t t = 1; t <= cfg.rounds; ++t) {
        std::vector<double> next(theta.size(), 0.0);
        double total = 0;
        for (const auto& s : prep.shards) total += static_cast<double>(s.size());
        for (std::size_t i = 0; i < cfg.num_clients; ++i) {
            RngStream rng(cfg.master_seed, {StreamPurpose::training, i, t});
            const auto local = local_train(ParamPoint(prep.model.manifold(), theta), prep.model,
                                           prep.shards[i], cfg.spsa, rng);
            const double p = static_cast<double>(prep.shards[i].size()) / total;
            for (std::size_t k = 0; k < theta.size(); ++k) next[k] += p * local.params[k];
        }
        theta = next;
        run.run_round();
        for (std::size_t k = 0; k < theta.size(); ++k) CHECK(run.global()[k] == doctest::Approx(theta[k]).epsilon(1e-10));
    }
}

TEST_CASE("surrogate learns separable blobs under medium noise") {
    // Reference: centralized surrogate training on the pooled shards.
    ExperimentConfig cfg;
    cfg.aggregation = {0.0, 0.05, {}};
    cfg.channel.flip_prob = 0.06;
    const auto prep = prepare_experiment(cfg);
    SpsaConfig central = cfg.spsa;
    central.steps_per_round = 400;
    RngStream crng(1, {StreamPurpose::test, 0, 0});
    const auto pooled = local_train(prep.initial, prep.model, prep.train, central, crng);
    // Unit-variance blobs with means `separation` apart: the Bayes rate is
    // Phi(separation / 2). Allow three binomial standard errors on the test set.
    const double bayes = 0.5 * std::erfc(-cfg.data.synth_separation / 2.0 / std::sqrt(2.0));
    const double se = std::sqrt(bayes * (1.0 - bayes) / static_cast<double>(prep.test.size()));
    CHECK(evaluate(prep.model, pooled.params, prep.test).accuracy >= bayes - 3.0 * se);

    int good = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        cfg.master_seed = seed;
        good += run_experiment(cfg).final_accuracy > 0.8;
    }
    CHECK(good >= 4);
}

TEST_CASE("sweeps") {
    auto cfg = small_config();
    const std::vector<std::string> one{"0.3"};
    const auto single = sweep(cfg, SweepAxis::beta, one);
    REQUIRE(single.size() == 1);
    REQUIRE(single[0].summary);
    auto direct = cfg;
    direct.aggregation.beta = 0.3;
    direct.master_seed = derive_sweep_seed(cfg.master_seed, "0.3");
    direct.data_seed = cfg.master_seed;
    const auto want = run_experiment(direct);
    for (std::size_t i = 0; i < want.records.size(); ++i) {
        CHECK(same_record(single[0].summary->records[i], want.records[i]));
    }

    const std::vector<std::string> values{"0.05", "2.0", "1.0"};
    const auto runs = sweep(cfg, SweepAxis::beta, values);
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].summary.has_value());
    CHECK_FALSE(runs[1].summary.has_value());
    CHECK(runs[1].error.find("aggregation.beta") != std::string::npos);
    CHECK(runs[2].summary.has_value());

    const std::vector<std::string> noise{"low", "0.12"};
    const auto nr = sweep(cfg, SweepAxis::noise, noise);
    CHECK(nr[0].config->channel.flip_prob == 0.01);
    CHECK(nr[1].config->channel.flip_prob == 0.12);
    CHECK(nr[0].config->resolved_data_seed() == cfg.master_seed);

    CHECK(apply_sweep_value(cfg, SweepAxis::partition, "label_skew").partition.scheme == PartitionScheme::label_skew);
    CHECK_THROWS_AS(apply_sweep_value(cfg, SweepAxis::partition, "zipf"), ConfigError);
    CHECK_THROWS_AS(sweep(cfg, SweepAxis::beta, std::vector<std::string>{}), ConfigError);
    CHECK(derive_sweep_seed(42, "0.05") != derive_sweep_seed(42, "0.1"));
}

TEST_CASE("config validation names the key") {
    auto cfg = small_config();
    cfg.num_clients = 0;
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.path() == "experiment.num_clients");
    }
    cfg = small_config();
    cfg.client_flip_probs = {0.1, 0.2};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.client_flip_probs = {0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.flip_prob_for(3) == 0.4);
    cfg.model.kind = ModelKind::circuit;
    cfg.data.pca_dim = 0;
    cfg.data.synth_dim = 6;
    CHECK_THROWS_AS(prepare_experiment(cfg), ConfigError);
}
