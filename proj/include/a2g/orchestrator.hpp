#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "a2g/aggregation.hpp"
#include "a2g/channel.hpp"
#include "a2g/data.hpp"
#include "a2g/model.hpp"
#include "a2g/optimizer.hpp"

namespace a2g {

enum class ModelKind { surrogate, circuit };

struct ModelConfig {
    ModelKind kind = ModelKind::surrogate;
    CircuitSpec circuit;
    bool bias = true;  // trailing offset added to the circuit output logit
};

enum class DataSource { synthetic, csv };

struct DataConfig {
    DataSource source = DataSource::synthetic;
    std::string csv_path;
    CsvOptions csv{"label", "1", {"not applicable", "indefinable"}};
    std::size_t synth_samples = 1000;
    std::size_t synth_dim = 4;
    double synth_separation = 3.0;
    std::size_t pca_dim = 4;  // 0 keeps the standardized features as they are
    double test_fraction = 0.2;
};

struct ExperimentConfig {
    std::size_t num_clients = 5;
    std::size_t rounds = 30;
    std::size_t eval_every = 1;
    std::uint64_t master_seed = 42;
    // Seed for dataset generation, holdout split and partitioning; defaults to
    // master_seed. Sweeps pin it so every value sees the same data.
    std::optional<std::uint64_t> data_seed;

    AggregationConfig aggregation{0.0, 1.0, {}};
    ChannelConfig channel;
    std::vector<double> client_flip_probs;  // per-client override of channel.flip_prob
    SpsaConfig spsa;
    ModelConfig model;
    PartitionSpec partition;
    DataConfig data;

    [[nodiscard]] PartitionSpec partition_spec() const;
    [[nodiscard]] std::uint64_t resolved_data_seed() const noexcept {
        return data_seed.value_or(master_seed);
    }
    [[nodiscard]] double flip_prob_for(std::size_t client) const;

    // Throws ConfigError naming the offending dotted key.
    void validate() const;
};

struct RunOptions {
    unsigned threads = 1;  // Phase-I workers; 0 = hardware concurrency. Capped at K.
};

struct RoundRecord {
    std::size_t round = 0;  // 1-based
    bool evaluated = false;
    double test_accuracy = 0.0;
    double global_loss = 0.0;  // size-weighted training loss over all shards
    std::vector<double> weights;
    double mean_fidelity = 0.0;
    double mean_latency = 0.0;
    double mean_instability = 0.0;
    double dispersion = 0.0;
    double grad_norm = 0.0;
    bool weight_fallback = false;
};

struct RunSummary {
    std::size_t epochs = 0;
    double best_accuracy = 0.0;
    double final_accuracy = 0.0;
    double mean_accuracy_last5 = 0.0;
    std::vector<RoundRecord> records;
};

struct Evaluation {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

// Thresholds predictions at 0.5; exactly 0.5 predicts class 1.
Evaluation evaluate(const Classifier& model, const ParamPoint& params, const Dataset& test);

// Data, model and starting point for one experiment.
struct PreparedExperiment {
    Classifier model;
    Dataset test;
    std::vector<Dataset> shards;
    Dataset train;  // union of the shards
    ParamPoint initial;
};

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg);

// Angular coordinates ~ Uniform[-pi/4, pi/4], linear coordinates 0.
ParamPoint initial_params(const Classifier& model, std::uint64_t master_seed);

// One client's local training and QoS measurement for round t.
ClientReport client_round(std::size_t client_id, const ParamPoint& global, const Dataset& shard,
                          const ExperimentConfig& cfg, const Classifier& model,
                          std::size_t round);

// Synchronous federated run; one run_round call per communication round.
class FederatedRun {
public:
    FederatedRun(ExperimentConfig cfg, RunOptions options = {});

    RoundRecord run_round();

    [[nodiscard]] const ParamPoint& global() const noexcept { return global_; }
    [[nodiscard]] std::size_t rounds_done() const noexcept { return round_; }
    [[nodiscard]] const PreparedExperiment& prepared() const noexcept { return prep_; }
    [[nodiscard]] const ExperimentConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] unsigned workers() const noexcept { return workers_; }

private:
    std::vector<ClientReport> collect_reports() const;

    ExperimentConfig cfg_;
    PreparedExperiment prep_;
    ParamPoint global_;
    unsigned workers_;
    std::size_t round_ = 0;
    double last_accuracy_ = 0.0;
    double last_loss_ = 0.0;
};

RunSummary summarize(std::vector<RoundRecord> records);

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

enum class SweepAxis { beta, noise, partition };

std::optional<SweepAxis> parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis) noexcept;

// Copy of base with the axis set to value. Throws ConfigError for bad values.
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepAxis axis,
                                   std::string_view value);

// master_seed XOR digest64(value).
std::uint64_t derive_sweep_seed(std::uint64_t master_seed, std::string_view value);

struct SweepRun {
    std::string value;
    std::optional<ExperimentConfig> config;
    std::optional<RunSummary> summary;
    std::string error;  // non-empty when the run failed
};

// One experiment per value, in order. Each run gets master seed
// derive_sweep_seed(base seed, value) and the base data seed. A failing value
// is recorded and the remaining values still run.
std::vector<SweepRun> sweep(const ExperimentConfig& base, SweepAxis axis,
                            std::span<const std::string> values, const RunOptions& options = {});

}  // namespace a2g
