#include "a2g/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "a2g/errors.hpp"

namespace a2g {

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto i = indices[r];
        if (i >= size()) throw StructuralError("Dataset::subset: index out of range");
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(i));
        out.labels.push_back(labels[i]);
    }
    return out;
}

std::array<std::size_t, 2> Dataset::label_counts() const noexcept {
    std::array<std::size_t, 2> counts{0, 0};
    for (int y : labels) ++counts[y == 1 ? 1 : 0];
    return counts;
}

void Dataset::validate() const {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw StructuralError("Dataset: feature rows != label count");
    }
    if (!features.allFinite()) throw StructuralError("Dataset: non-finite feature value");
    for (int y : labels) {
        if (y != 0 && y != 1) throw StructuralError("Dataset: labels must be 0 or 1");
    }
}

// --- preprocessing ---------------------------------------------------------

Standardizer Standardizer::fit(const Dataset& train) {
    if (train.empty()) throw StructuralError("standardize: empty training set");
    const auto n = static_cast<double>(train.size());
    Standardizer s;
    s.mean = train.features.colwise().mean().transpose();
    const FeatureMatrix centered = train.features.rowwise() - s.mean.transpose();
    s.scale = (centered.array().square().colwise().sum() / n).sqrt().transpose();
    s.scale = s.scale.cwiseMax(kStdFloor);
    return s;
}

Dataset Standardizer::apply(const Dataset& ds) const {
    if (ds.dim() != static_cast<std::size_t>(mean.size())) {
        throw StructuralError("standardize: feature dimension mismatch");
    }
    Dataset out = ds;
    out.features = ((ds.features.rowwise() - mean.transpose()).array().rowwise() /
                    scale.transpose().array())
                       .matrix();
    return out;
}

StandardizeResult standardize(const Dataset& train, std::span<const Dataset> apply_to) {
    StandardizeResult r;
    r.transform = Standardizer::fit(train);
    r.train = r.transform.apply(train);
    for (const auto& ds : apply_to) r.applied.push_back(r.transform.apply(ds));
    return r;
}

Dataset PcaModel::apply(const Dataset& ds) const {
    if (ds.dim() != static_cast<std::size_t>(mean.size())) {
        throw StructuralError("pca: feature dimension mismatch");
    }
    Dataset out;
    out.labels = ds.labels;
    out.features = (ds.features.rowwise() - mean.transpose()) * components;
    return out;
}

FeatureMatrix PcaModel::lift(const FeatureMatrix& projected) const {
    return projected * components.transpose();
}

PcaResult pca_reduce(const Dataset& train, std::span<const Dataset> apply_to, std::size_t d_out) {
    const std::size_t d_raw = train.dim();
    if (d_out == 0 || d_out > d_raw || d_raw > train.size()) {
        throw StructuralError("pca_reduce: need 0 < d_out <= d_raw <= n (d_out=" +
                              std::to_string(d_out) + ", d_raw=" + std::to_string(d_raw) +
                              ", n=" + std::to_string(train.size()) + ")");
    }
    PcaModel model;
    model.mean = train.features.colwise().mean().transpose();
    const Eigen::MatrixXd centered = train.features.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(train.size());

    // Eigen returns eigenvalues in ascending order.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw StructuralError("pca_reduce: eigensolver failed");
    const auto dr = static_cast<Eigen::Index>(d_raw);
    const auto dk = static_cast<Eigen::Index>(d_out);
    model.components.resize(dr, dk);
    model.variances.resize(dk);
    for (Eigen::Index c = 0; c < dk; ++c) {
        const Eigen::Index src = dr - 1 - c;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        model.components.col(c) = v;
        model.variances(c) = std::max(solver.eigenvalues()(src), 0.0);
    }

    PcaResult r;
    r.train = model.apply(train);
    for (const auto& ds : apply_to) r.applied.push_back(model.apply(ds));
    r.model = std::move(model);
    return r;
}

TrainTestSplit train_test_split(const Dataset& ds, double test_fraction, RngStream& rng) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
        throw StructuralError("train_test_split: test_fraction must lie in [0, 1)");
    }
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(ds.size())));
    std::span<const std::size_t> all(idx);
    std::vector<std::size_t> test(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(all.begin() + static_cast<std::ptrdiff_t>(n_test), all.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return {ds.subset(train), ds.subset(test)};
}

// --- partitioning ----------------------------------------------------------

std::optional<PartitionScheme> parse_partition_scheme(std::string_view name) {
    if (name == "iid") return PartitionScheme::iid;
    if (name == "label_skew") return PartitionScheme::label_skew;
    if (name == "quantity_skew") return PartitionScheme::quantity_skew;
    return std::nullopt;
}

std::string_view to_string(PartitionScheme scheme) noexcept {
    switch (scheme) {
        case PartitionScheme::iid: return "iid";
        case PartitionScheme::label_skew: return "label_skew";
        case PartitionScheme::quantity_skew: return "quantity_skew";
    }
    return "?";
}

void PartitionSpec::validate() const {
    if (num_clients < 1) throw StructuralError("partition: num_clients must be >= 1");
    if (min_shard < 1) throw StructuralError("partition: min_shard must be >= 1");
    if (quantity_low < min_shard) throw StructuralError("partition: quantity_low < min_shard");
    if (quantity_high < quantity_low) throw StructuralError("partition: quantity_high < quantity_low");
    if (!(skew_bias >= 0.0 && skew_bias <= 1.0)) {
        throw StructuralError("partition: skew_bias must lie in [0, 1]");
    }
}

namespace {

std::vector<std::size_t> shuffled_range(std::size_t n, RngStream& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    return idx;
}

// Splits `total` into integer parts proportional to `demand` (largest
// remainder, ties to the lower index).
std::vector<std::size_t> apportion(std::size_t total, std::span<const double> demand) {
    std::vector<std::size_t> out(demand.size(), 0);
    const double sum = std::accumulate(demand.begin(), demand.end(), 0.0);
    if (total == 0 || !(sum > 0.0)) return out;
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < demand.size(); ++k) {
        const double exact = static_cast<double>(total) * demand[k] / sum;
        out[k] = static_cast<std::size_t>(std::floor(exact));
        assigned += out[k];
        remainders.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; assigned < total; ++j, ++assigned) ++out[remainders[j % demand.size()].second];
    return out;
}

Partition partition_iid(const Dataset& ds, const PartitionSpec& spec, RngStream& rng) {
    const std::size_t n = ds.size();
    const std::size_t k = spec.num_clients;
    if (n / k < spec.min_shard) {
        throw StructuralError("iid partition: " + std::to_string(n) + " samples cannot give " +
                              std::to_string(k) + " shards of at least " +
                              std::to_string(spec.min_shard));
    }
    const auto idx = shuffled_range(n, rng);
    Partition out(k);
    std::size_t pos = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t len = n / k + (c < n % k ? 1 : 0);
        out[c].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                      idx.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return out;
}

std::array<std::vector<std::size_t>, 2> label_pools(const Dataset& ds, RngStream& rng) {
    std::array<std::vector<std::size_t>, 2> pools;
    for (std::size_t i = 0; i < ds.size(); ++i) pools[ds.labels[i] == 1 ? 1 : 0].push_back(i);
    for (auto& p : pools) std::shuffle(p.begin(), p.end(), rng.engine());
    return pools;
}

Partition partition_label_skew(const Dataset& ds, const PartitionSpec& spec, RngStream& rng) {
    const std::size_t k = spec.num_clients;
    if (k == 1) {
        Partition out(1, shuffled_range(ds.size(), rng));
        if (out[0].size() < spec.min_shard) {
            throw StructuralError("label_skew partition: dataset smaller than min_shard");
        }
        return out;
    }
    const auto counts = ds.label_counts();
    const double a0 = static_cast<double>(counts[0]);
    const double a1 = static_cast<double>(counts[1]);
    const double b = spec.skew_bias;
    const double n0 = static_cast<double>((k + 1) / 2);  // clients preferring label 0
    const double n1 = static_cast<double>(k / 2);        // clients preferring label 1

    // Per-client shard size for each preference group, from
    //   b n0 S0 + (1-b) n1 S1 = A0,  (1-b) n0 S0 + b n1 S1 = A1.
    double s0 = 0.0;
    double s1 = 0.0;
    const double det = 2.0 * b - 1.0;
    if (std::abs(det) < 1e-12) {
        s0 = s1 = (a0 + a1) / static_cast<double>(k);
    } else {
        s0 = (b * a0 - (1.0 - b) * a1) / (n0 * det);
        s1 = (b * a1 - (1.0 - b) * a0) / (n1 * det);
    }
    const double min_shard = static_cast<double>(spec.min_shard);
    for (int g = 0; g < 2; ++g) {
        const double s = g == 0 ? s0 : s1;
        if (s < min_shard) {
            throw StructuralError(
                "label_skew partition infeasible: clients preferring label " + std::to_string(g) +
                " would hold " + std::to_string(s) + " samples (min_shard " +
                std::to_string(spec.min_shard) + "); available label 0: " +
                std::to_string(counts[0]) + ", label 1: " + std::to_string(counts[1]));
        }
    }

    std::array<std::vector<double>, 2> demand{std::vector<double>(k), std::vector<double>(k)};
    for (std::size_t c = 0; c < k; ++c) {
        const int pref = static_cast<int>(c % 2);
        const double s = pref == 0 ? s0 : s1;
        demand[pref][c] = b * s;
        demand[1 - pref][c] = (1.0 - b) * s;
    }

    auto pools = label_pools(ds, rng);
    Partition out(k);
    for (int label = 0; label < 2; ++label) {
        const auto alloc = apportion(pools[label].size(), demand[label]);
        std::size_t pos = 0;
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < alloc[c]; ++j) out[c].push_back(pools[label][pos++]);
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (out[c].size() < spec.min_shard) {
            throw StructuralError("label_skew partition: client " + std::to_string(c) +
                                  " received " + std::to_string(out[c].size()) +
                                  " samples after rounding (min_shard " +
                                  std::to_string(spec.min_shard) + ")");
        }
    }
    return out;
}

Partition partition_quantity_skew(const Dataset& ds, const PartitionSpec& spec, RngStream& rng) {
    const std::size_t k = spec.num_clients;
    std::vector<std::size_t> sizes(k);
    std::size_t total = 0;
    for (auto& s : sizes) {
        s = spec.quantity_low + rng.below(spec.quantity_high - spec.quantity_low + 1);
        total += s;
    }
    if (total > ds.size()) {
        throw StructuralError("quantity_skew partition infeasible: shards need " +
                              std::to_string(total) + " samples, dataset has " +
                              std::to_string(ds.size()));
    }
    auto pools = label_pools(ds, rng);
    const double share1 =
        static_cast<double>(pools[1].size()) / static_cast<double>(ds.size());
    std::array<std::size_t, 2> used{0, 0};
    Partition out(k);
    for (std::size_t c = 0; c < k; ++c) {
        const auto want1 = std::min<std::size_t>(
            sizes[c], static_cast<std::size_t>(std::llround(static_cast<double>(sizes[c]) * share1)));
        const std::array<std::size_t, 2> want{sizes[c] - want1, want1};
        for (int label = 0; label < 2; ++label) {
            if (used[label] + want[label] > pools[label].size()) {
                throw StructuralError("quantity_skew partition infeasible: label " +
                                      std::to_string(label) + " short by " +
                                      std::to_string(used[label] + want[label] - pools[label].size()) +
                                      " samples at client " + std::to_string(c));
            }
            for (std::size_t j = 0; j < want[label]; ++j) out[c].push_back(pools[label][used[label]++]);
        }
    }
    return out;
}

}  // namespace

Partition partition(const Dataset& ds, const PartitionSpec& spec, RngStream& rng) {
    spec.validate();
    Partition out;
    switch (spec.scheme) {
        case PartitionScheme::iid: out = partition_iid(ds, spec, rng); break;
        case PartitionScheme::label_skew: out = partition_label_skew(ds, spec, rng); break;
        case PartitionScheme::quantity_skew: out = partition_quantity_skew(ds, spec, rng); break;
    }
    for (auto& shard : out) std::sort(shard.begin(), shard.end());
    return out;
}

// --- sources ---------------------------------------------------------------

Dataset synth_blobs(std::size_t n, std::size_t d, double separation, RngStream& rng) {
    if (n < 2 || d < 1) throw StructuralError("synth_blobs: need n >= 2 and d >= 1");
    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = static_cast<int>(i % 2);
        ds.labels[i] = y;
        for (std::size_t j = 0; j < d; ++j) {
            double v = rng.normal();
            if (j == 0) v += (y == 1 ? 0.5 : -0.5) * separation;
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return ds;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Splits one CSV record. Double-quoted fields may contain commas; "" escapes a quote.
std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw DataError("unterminated quoted field", line_no);
    fields.emplace_back(trim(cur));
    return fields;
}

std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvOptions& options) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        const auto line = text.substr(0, nl);
        if (!trim(line).empty()) lines.emplace_back(line_no, line);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    }
    if (lines.empty()) throw DataError("empty CSV input");

    auto header = split_record(lines.front().second, lines.front().first);
    if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) header.front().erase(0, 3);
    const auto label_it = std::find(header.begin(), header.end(), options.label_column);
    if (label_it == header.end()) {
        throw DataError("missing label column '" + options.label_column + "'", lines.front().first);
    }
    const auto label_col = static_cast<std::size_t>(label_it - header.begin());

    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto fields = split_record(lines[r].second, lines[r].first);
        if (fields.size() != header.size()) {
            throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()),
                            lines[r].first);
        }
        const bool dropped = std::any_of(fields.begin(), fields.end(), [&](const std::string& f) {
            return std::find(options.drop_tokens.begin(), options.drop_tokens.end(), f) !=
                   options.drop_tokens.end();
        });
        if (dropped) continue;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c != label_col && fields[c].empty()) {
                throw DataError("empty value in column '" + header[c] + "'", lines[r].first);
            }
        }
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw DataError("CSV has no data rows", lines.front().first);

    const std::size_t n = rows.size();
    const std::size_t d = header.size() - 1;
    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ds.labels.resize(n);
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == label_col) continue;
        const bool numeric = std::all_of(rows.begin(), rows.end(), [&](const auto& row) {
            return parse_number(row[c]).has_value();
        });
        std::map<std::string, double> codes;
        for (std::size_t r = 0; r < n; ++r) {
            double v = 0.0;
            if (numeric) {
                v = *parse_number(rows[r][c]);
            } else {
                const auto [it, inserted] =
                    codes.try_emplace(rows[r][c], static_cast<double>(codes.size()));
                v = it->second;
            }
            ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out_col)) = v;
        }
        ++out_col;
    }
    for (std::size_t r = 0; r < n; ++r) {
        ds.labels[r] = rows[r][label_col] == options.positive_token ? 1 : 0;
    }
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), options);
}

}  // namespace a2g
