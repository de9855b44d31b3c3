#include "a2g/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <thread>

#include "a2g/digest.hpp"
#include "a2g/errors.hpp"

namespace a2g {

// --- config ----------------------------------------------------------------

PartitionSpec ExperimentConfig::partition_spec() const {
    PartitionSpec spec = partition;
    spec.num_clients = num_clients;
    return spec;
}

double ExperimentConfig::flip_prob_for(std::size_t client) const {
    return client < client_flip_probs.size() ? client_flip_probs[client] : channel.flip_prob;
}

namespace {

// Runs a sub-validator and rethrows its message under the given key prefix.
template <class F>
void check_section(const char* path, F&& f) {
    try {
        f();
    } catch (const StructuralError& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (num_clients < 1) throw ConfigError("experiment.num_clients", "must be >= 1");
    if (rounds < 1) throw ConfigError("experiment.rounds", "must be >= 1");
    if (eval_every < 1) throw ConfigError("experiment.eval_every", "must be >= 1");

    if (!(aggregation.beta >= 0.0 && aggregation.beta <= 1.0)) {
        throw ConfigError("aggregation.beta", "must lie in [0, 1]");
    }
    if (!(aggregation.eta >= 0.0) || !std::isfinite(aggregation.eta)) {
        throw ConfigError("aggregation.eta", "must be >= 0");
    }
    if (!(aggregation.gains.alpha >= 0.0)) throw ConfigError("aggregation.alpha", "must be >= 0");
    if (!(aggregation.gains.gamma >= 0.0)) throw ConfigError("aggregation.gamma", "must be >= 0");
    if (!(aggregation.gains.delta >= 0.0)) throw ConfigError("aggregation.delta", "must be >= 0");
    if (!(aggregation.gains.epsilon > 0.0)) throw ConfigError("aggregation.epsilon", "must be > 0");

    if (!(channel.flip_prob >= 0.0 && channel.flip_prob < 1.0)) {
        throw ConfigError("channel.flip_prob", "must lie in [0, 1)");
    }
    check_section("channel", [&] { channel.validate(); });
    if (!client_flip_probs.empty() && client_flip_probs.size() != num_clients) {
        throw ConfigError("channel.client_flip_probs", "needs exactly num_clients entries");
    }
    for (double p : client_flip_probs) {
        if (!(p >= 0.0 && p < 1.0)) throw ConfigError("channel.client_flip_probs", "entries must lie in [0, 1)");
    }

    if (!(spsa.a0 > 0.0)) throw ConfigError("spsa.a0", "must be > 0");
    if (!(spsa.c0 > 0.0)) throw ConfigError("spsa.c0", "must be > 0");
    if (!(spsa.alpha_exp > 0.0 && spsa.alpha_exp <= 1.0)) throw ConfigError("spsa.alpha_exp", "must lie in (0, 1]");
    if (!(spsa.gamma_exp > 0.0 && spsa.gamma_exp <= 1.0)) throw ConfigError("spsa.gamma_exp", "must lie in (0, 1]");

    if (model.kind == ModelKind::circuit) {
        check_section("model", [&] { model.circuit.validate(); });
        const std::size_t features = data.pca_dim > 0 ? data.pca_dim : 0;
        if (features > model.circuit.num_qubits) {
            throw ConfigError("data.pca_dim", "exceeds model.num_qubits for the circuit model");
        }
    }

    check_section("partition", [&] { partition_spec().validate(); });

    if (data.source == DataSource::csv) {
        if (data.csv_path.empty()) throw ConfigError("data.csv_path", "required when data.source = csv");
        if (data.csv.label_column.empty()) throw ConfigError("data.label_column", "must not be empty");
    } else {
        if (data.synth_samples < 2) throw ConfigError("data.synth_samples", "must be >= 2");
        if (data.synth_dim < 1) throw ConfigError("data.synth_dim", "must be >= 1");
        if (data.pca_dim > data.synth_dim) throw ConfigError("data.pca_dim", "exceeds data.synth_dim");
    }
    if (!(data.test_fraction > 0.0 && data.test_fraction < 1.0)) {
        throw ConfigError("data.test_fraction", "must lie in (0, 1)");
    }
}

// --- setup -----------------------------------------------------------------

Evaluation evaluate(const Classifier& model, const ParamPoint& params, const Dataset& test) {
    if (test.empty()) throw StructuralError("evaluate: empty test set");
    std::size_t correct = 0;
    double loss = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const double p = model.predict(params, test.row(i));
        const int predicted = p >= 0.5 ? 1 : 0;
        if (predicted == test.labels[i]) ++correct;
        loss += binary_cross_entropy(p, test.labels[i]);
    }
    const auto n = static_cast<double>(test.size());
    return {static_cast<double>(correct) / n, loss / n};
}

ParamPoint initial_params(const Classifier& model, std::uint64_t master_seed) {
    RngStream rng(master_seed, {StreamPurpose::init, 0, 0});
    const auto& spec = model.manifold();
    std::vector<double> coords(spec->dim(), 0.0);
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (spec->is_angular(k)) coords[k] = rng.uniform(-kPi / 4.0, kPi / 4.0);
    }
    return ParamPoint(spec, std::move(coords));
}

namespace {

Classifier make_classifier(const ExperimentConfig& cfg, std::size_t feature_dim) {
    if (cfg.model.kind == ModelKind::surrogate) return Classifier(LogisticSurrogate{feature_dim});
    if (feature_dim > cfg.model.circuit.num_qubits) {
        throw ConfigError("model.num_qubits", "circuit has fewer qubits than input features (" +
                                                  std::to_string(feature_dim) + ")");
    }
    return Classifier(VariationalCircuit{cfg.model.circuit, cfg.model.bias});
}

}  // namespace

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::uint64_t seed = cfg.resolved_data_seed();

    Dataset raw;
    if (cfg.data.source == DataSource::csv) {
        raw = load_csv(cfg.data.csv_path, cfg.data.csv);
    } else {
        RngStream rng(seed, {StreamPurpose::data, 0, 0});
        raw = synth_blobs(cfg.data.synth_samples, cfg.data.synth_dim, cfg.data.synth_separation, rng);
    }
    raw.validate();

    RngStream split_rng(seed, {StreamPurpose::split, 0, 0});
    auto split = train_test_split(raw, cfg.data.test_fraction, split_rng);
    if (split.test.empty()) throw StructuralError("prepare_experiment: empty test split");

    const Dataset test_only[] = {split.test};
    auto scaled = standardize(split.train, test_only);
    Dataset train = std::move(scaled.train);
    Dataset test = std::move(scaled.applied.front());
    if (cfg.data.pca_dim > 0) {
        if (cfg.data.pca_dim > train.dim()) {
            throw ConfigError("data.pca_dim", "exceeds the number of input features (" +
                                                  std::to_string(train.dim()) + ")");
        }
        const Dataset scaled_test[] = {test};
        auto reduced = pca_reduce(train, scaled_test, cfg.data.pca_dim);
        train = std::move(reduced.train);
        test = std::move(reduced.applied.front());
    }

    RngStream part_rng(seed, {StreamPurpose::partition, 0, 0});
    const Partition parts = partition(train, cfg.partition_spec(), part_rng);

    Classifier model = make_classifier(cfg, train.dim());
    std::vector<Dataset> shards;
    std::vector<std::size_t> union_idx;
    for (const auto& p : parts) {
        shards.push_back(train.subset(p));
        union_idx.insert(union_idx.end(), p.begin(), p.end());
    }
    std::sort(union_idx.begin(), union_idx.end());
    ParamPoint init = initial_params(model, cfg.master_seed);
    return {std::move(model), std::move(test), std::move(shards), train.subset(union_idx),
            std::move(init)};
}

ClientReport client_round(std::size_t client_id, const ParamPoint& global, const Dataset& shard,
                          const ExperimentConfig& cfg, const Classifier& model,
                          std::size_t round) {
    const std::uint64_t seed = cfg.master_seed;
    RngStream train_rng(seed, {StreamPurpose::training, client_id, round});
    LocalTrainResult local = [&] {
        try {
            return local_train(global, model, shard, cfg.spsa, train_rng);
        } catch (const DivergenceError& e) {
            throw DivergenceError("client " + std::to_string(client_id) + ", round " +
                                  std::to_string(round) + ": " + e.what());
        }
    }();

    ChannelConfig channel = cfg.channel;
    channel.flip_prob = cfg.flip_prob_for(client_id);
    RngStream fid_rng(seed, {StreamPurpose::fidelity, client_id, round});
    RngStream lat_rng(seed, {StreamPurpose::latency, client_id, round});

    QosSample qos;
    qos.fidelity = sample_fidelity(channel, fid_rng);
    qos.latency = sample_latency(channel, lat_rng);
    qos.instability = local.loss_history.empty()
                          ? 0.0
                          : measure_instability(local.loss_history, channel.instability_window,
                                                channel.s_max);

    std::optional<std::vector<double>> grad;
    if (!local.gradient.empty()) grad = std::move(local.gradient);
    return {client_id, std::move(local.params), std::move(grad), qos, shard.size()};
}

// --- run loop --------------------------------------------------------------

namespace {

unsigned resolve_workers(unsigned requested, std::size_t clients) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(n, clients));
}

}  // namespace

FederatedRun::FederatedRun(ExperimentConfig cfg, RunOptions options)
    : cfg_(std::move(cfg)),
      prep_(prepare_experiment(cfg_)),
      global_(prep_.initial),
      workers_(resolve_workers(options.threads, cfg_.num_clients)) {}

std::vector<ClientReport> FederatedRun::collect_reports() const {
    const std::size_t k = cfg_.num_clients;
    const std::size_t t = round_ + 1;
    std::vector<std::optional<ClientReport>> slots(k);
    std::vector<std::exception_ptr> errors(k);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < k; i = next++) {
            try {
                slots[i] = client_round(i, global_, prep_.shards[i], cfg_, prep_.model, t);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers_ <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers_; ++w) pool.emplace_back(worker);
    }

    // Barrier passed: every slot is filled or holds an error. Reports stay
    // keyed by client id, independent of completion order.
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<ClientReport> reports;
    reports.reserve(k);
    for (auto& s : slots) reports.push_back(std::move(*s));
    return reports;
}

RoundRecord FederatedRun::run_round() {
    const std::vector<ClientReport> reports = collect_reports();
    ++round_;

    std::vector<ParamPoint> client_params;
    client_params.reserve(reports.size());
    for (const auto& r : reports) client_params.push_back(r.params);

    RoundRecord rec;
    rec.round = round_;
    rec.dispersion = dispersion(global_, client_params);

    A2gUpdate upd = a2g_update(global_, reports, cfg_.aggregation);
    global_ = std::move(upd.next);

    const auto k = static_cast<double>(reports.size());
    for (const auto& r : reports) {
        rec.mean_fidelity += r.qos.fidelity / k;
        rec.mean_latency += r.qos.latency / k;
        rec.mean_instability += r.qos.instability / k;
    }
    rec.weights = std::move(upd.weights.weights);
    rec.weight_fallback = upd.weights.fallback;
    if (upd.aggregated_gradient) rec.grad_norm = l2_norm(*upd.aggregated_gradient);

    if (round_ % cfg_.eval_every == 0 || round_ == cfg_.rounds) {
        last_accuracy_ = evaluate(prep_.model, global_, prep_.test).accuracy;
        last_loss_ = bce_loss(prep_.model, global_, prep_.train);
        rec.evaluated = true;
    }
    rec.test_accuracy = last_accuracy_;
    rec.global_loss = last_loss_;
    return rec;
}

RunSummary summarize(std::vector<RoundRecord> records) {
    RunSummary s;
    s.epochs = records.size();
    std::vector<double> acc;
    for (const auto& r : records) {
        if (r.evaluated) acc.push_back(r.test_accuracy);
    }
    if (!acc.empty()) {
        s.best_accuracy = *std::max_element(acc.begin(), acc.end());
        s.final_accuracy = acc.back();
        const std::size_t tail = std::min<std::size_t>(5, acc.size());
        double sum = 0.0;
        for (std::size_t i = acc.size() - tail; i < acc.size(); ++i) sum += acc[i];
        s.mean_accuracy_last5 = sum / static_cast<double>(tail);
    }
    s.records = std::move(records);
    return s;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    FederatedRun run(cfg, options);
    std::vector<RoundRecord> records;
    records.reserve(cfg.rounds);
    for (std::size_t t = 0; t < cfg.rounds; ++t) records.push_back(run.run_round());
    return summarize(std::move(records));
}

// --- sweeps ----------------------------------------------------------------

std::optional<SweepAxis> parse_sweep_axis(std::string_view name) {
    if (name == "beta") return SweepAxis::beta;
    if (name == "noise") return SweepAxis::noise;
    if (name == "partition") return SweepAxis::partition;
    return std::nullopt;
}

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
        case SweepAxis::beta: return "beta";
        case SweepAxis::noise: return "noise";
        case SweepAxis::partition: return "partition";
    }
    return "?";
}

namespace {

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepAxis axis,
                                   std::string_view value) {
    ExperimentConfig cfg = base;
    switch (axis) {
        case SweepAxis::beta: {
            const auto v = parse_double(value);
            if (!v) throw ConfigError("aggregation.beta", "not a number: '" + std::string(value) + "'");
            cfg.aggregation.beta = *v;
            break;
        }
        case SweepAxis::noise: {
            auto p = noise_preset(value);
            if (!p) p = parse_double(value);
            if (!p) throw ConfigError("channel.flip_prob", "unknown noise level '" + std::string(value) + "'");
            cfg.channel.flip_prob = *p;
            cfg.client_flip_probs.clear();
            break;
        }
        case SweepAxis::partition: {
            const auto scheme = parse_partition_scheme(value);
            if (!scheme) throw ConfigError("partition.scheme", "unknown scheme '" + std::string(value) + "'");
            cfg.partition.scheme = *scheme;
            break;
        }
    }
    cfg.validate();
    return cfg;
}

std::uint64_t derive_sweep_seed(std::uint64_t master_seed, std::string_view value) {
    return master_seed ^ digest64(value);
}

std::vector<SweepRun> sweep(const ExperimentConfig& base, SweepAxis axis,
                            std::span<const std::string> values, const RunOptions& options) {
    if (values.empty()) throw ConfigError("sweep.values", "must not be empty");
    std::vector<SweepRun> runs;
    for (const auto& value : values) {
        SweepRun run;
        run.value = value;
        try {
            ExperimentConfig cfg = apply_sweep_value(base, axis, value);
            cfg.data_seed = base.resolved_data_seed();
            cfg.master_seed = derive_sweep_seed(base.master_seed, value);
            run.config = cfg;
            run.summary = run_experiment(cfg, options);
        } catch (const std::exception& e) {
            run.error = e.what();
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

}  // namespace a2g
