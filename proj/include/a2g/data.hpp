#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "a2g/rng.hpp"

namespace a2g {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Binary-labelled feature table.
struct Dataset {
    FeatureMatrix features;
    std::vector<int> labels;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
    [[nodiscard]] bool empty() const noexcept { return labels.empty(); }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {features.data() + i * dim(), dim()};
    }

    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;
    [[nodiscard]] std::array<std::size_t, 2> label_counts() const noexcept;

    // Throws StructuralError on shape mismatch, non-finite entries or labels
    // outside {0, 1}.
    void validate() const;
};

// --- preprocessing ---------------------------------------------------------

inline constexpr double kStdFloor = 1e-12;

struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // population std, floored at kStdFloor

    static Standardizer fit(const Dataset& train);
    [[nodiscard]] Dataset apply(const Dataset& ds) const;
};

struct StandardizeResult {
    Standardizer transform;
    Dataset train;
    std::vector<Dataset> applied;
};

// Fits per-feature mean/std on train only and applies the same affine map to
// train and every apply_to set. Constant features map to 0.
StandardizeResult standardize(const Dataset& train, std::span<const Dataset> apply_to);

struct PcaModel {
    Eigen::VectorXd mean;        // train mean
    Eigen::MatrixXd components;  // d_raw x d_out, orthonormal columns
    Eigen::VectorXd variances;   // eigenvalues, descending, floored at 0

    [[nodiscard]] Dataset apply(const Dataset& ds) const;
    // Maps projected rows back to (centered) input space.
    [[nodiscard]] FeatureMatrix lift(const FeatureMatrix& projected) const;
};

struct PcaResult {
    PcaModel model;
    Dataset train;
    std::vector<Dataset> applied;
};

// Projects onto the top d_out eigenvectors of the train covariance. Each
// component's largest-magnitude entry is made positive.
PcaResult pca_reduce(const Dataset& train, std::span<const Dataset> apply_to, std::size_t d_out);

struct TrainTestSplit {
    Dataset train;
    Dataset test;
};

// Shuffled proportional holdout.
TrainTestSplit train_test_split(const Dataset& ds, double test_fraction, RngStream& rng);

// --- partitioning ----------------------------------------------------------

enum class PartitionScheme { iid, label_skew, quantity_skew };

std::optional<PartitionScheme> parse_partition_scheme(std::string_view name);
std::string_view to_string(PartitionScheme scheme) noexcept;

struct PartitionSpec {
    PartitionScheme scheme = PartitionScheme::iid;
    std::size_t num_clients = 5;
    std::size_t min_shard = 10;
    std::size_t quantity_low = 20;
    std::size_t quantity_high = 150;
    double skew_bias = 0.8;  // fraction of a label-skewed shard from its preferred label

    void validate() const;
};

using Partition = std::vector<std::vector<std::size_t>>;

// Disjoint row-index sets, one per client, each sorted ascending.
//
// iid           shuffled, sizes differ by at most one, every row assigned.
// label_skew    client k prefers label k % 2. Shard sizes for the two groups
//               are solved so that a skew_bias fraction of each shard comes
//               from its preferred label while the global histogram is kept.
//               Each label pool is then apportioned by largest remainder, so
//               every row is assigned and compositions match up to rounding.
// quantity_skew sizes ~ Uniform{low..high}; each shard takes
//               round(size * global label-1 share) label-1 rows. Rows left
//               over are not assigned.
Partition partition(const Dataset& ds, const PartitionSpec& spec, RngStream& rng);

// --- sources ---------------------------------------------------------------

// Two isotropic unit-variance Gaussian clusters at -/+ (separation / 2) e_1;
// row i has label i % 2.
Dataset synth_blobs(std::size_t n, std::size_t d, double separation, RngStream& rng);

struct CsvOptions {
    std::string label_column;
    std::string positive_token = "1";
    std::vector<std::string> drop_tokens;
};

// Comma-separated, header row first. Rows containing any drop token are
// removed; columns with any non-numeric cell are label-encoded by first
// appearance; the label column becomes 1 where it equals positive_token.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);
Dataset parse_csv(std::string_view text, const CsvOptions& options);

}  // namespace a2g
