#include "a2g/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "a2g/errors.hpp"

namespace a2g {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class Int>
std::string fmt_int(Int v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError(std::string(key), "expected a finite number, got '" + std::string(text) + "'");
    }
    return v;
}

template <class Int>
Int to_int(std::string_view key, std::string_view text) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key), "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

struct Key {
    std::string name;
    std::string help;
    std::function<void(Settings&, std::string_view key, std::string_view value)> set;
    // Empty for write-only shortcut keys.
    std::function<std::string(const Settings&)> get;
};

#define A2G_FIELD_DOUBLE(NAME, HELP, EXPR)                                                   \
    Key{NAME, HELP, [](Settings& s, std::string_view k, std::string_view v) { EXPR = to_double(k, v); }, \
        [](const Settings& s) { return fmt_double(EXPR); }}
#define A2G_FIELD_SIZE(NAME, HELP, EXPR)                                                     \
    Key{NAME, HELP,                                                                          \
        [](Settings& s, std::string_view k, std::string_view v) { EXPR = to_int<std::size_t>(k, v); }, \
        [](const Settings& s) { return fmt_int(EXPR); }}
#define A2G_FIELD_UNSIGNED(NAME, HELP, EXPR)                                                 \
    Key{NAME, HELP,                                                                          \
        [](Settings& s, std::string_view k, std::string_view v) { EXPR = to_int<unsigned>(k, v); }, \
        [](const Settings& s) { return fmt_int(EXPR); }}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        A2G_FIELD_SIZE("experiment.num_clients", "number of clients K", s.experiment.num_clients),
        A2G_FIELD_SIZE("experiment.rounds", "communication rounds T", s.experiment.rounds),
        A2G_FIELD_SIZE("experiment.eval_every", "evaluate every n rounds (and at the last)",
                       s.experiment.eval_every),
        Key{"experiment.master_seed", "64-bit seed for init, training and channel streams",
            [](Settings& s, std::string_view k, std::string_view v) {
                s.experiment.master_seed = to_int<std::uint64_t>(k, v);
            },
            [](const Settings& s) { return fmt_int(s.experiment.master_seed); }},
        Key{"experiment.data_seed", "seed for data, split and partition; empty = master_seed",
            [](Settings& s, std::string_view k, std::string_view v) {
                if (v.empty()) {
                    s.experiment.data_seed.reset();
                } else {
                    s.experiment.data_seed = to_int<std::uint64_t>(k, v);
                }
            },
            [](const Settings& s) {
                return s.experiment.data_seed ? fmt_int(*s.experiment.data_seed) : std::string();
            }},

        Key{"model.kind", "surrogate | circuit",
            [](Settings& s, std::string_view k, std::string_view v) {
                if (v == "surrogate") {
                    s.experiment.model.kind = ModelKind::surrogate;
                } else if (v == "circuit") {
                    s.experiment.model.kind = ModelKind::circuit;
                } else {
                    throw ConfigError(std::string(k), "expected surrogate or circuit, got '" + std::string(v) + "'");
                }
            },
            [](const Settings& s) {
                return std::string(s.experiment.model.kind == ModelKind::circuit ? "circuit" : "surrogate");
            }},
        A2G_FIELD_UNSIGNED("model.num_qubits", "circuit width", s.experiment.model.circuit.num_qubits),
        A2G_FIELD_UNSIGNED("model.num_layers", "circuit depth", s.experiment.model.circuit.num_layers),
        A2G_FIELD_UNSIGNED("model.readout_qubit", "measured qubit", s.experiment.model.circuit.readout_qubit),
        Key{"model.bias", "trailing offset added to the circuit output logit",
            [](Settings& s, std::string_view k, std::string_view v) { s.experiment.model.bias = to_bool(k, v); },
            [](const Settings& s) { return std::string(s.experiment.model.bias ? "true" : "false"); }},

        Key{"data.source", "synthetic | csv",
            [](Settings& s, std::string_view k, std::string_view v) {
                if (v == "synthetic") {
                    s.experiment.data.source = DataSource::synthetic;
                } else if (v == "csv") {
                    s.experiment.data.source = DataSource::csv;
                } else {
                    throw ConfigError(std::string(k), "expected synthetic or csv, got '" + std::string(v) + "'");
                }
            },
            [](const Settings& s) {
                return std::string(s.experiment.data.source == DataSource::csv ? "csv" : "synthetic");
            }},
        Key{"data.csv_path", "input table for data.source = csv",
            [](Settings& s, std::string_view, std::string_view v) { s.experiment.data.csv_path = v; },
            [](const Settings& s) { return s.experiment.data.csv_path; }},
        Key{"data.label_column", "name of the label column",
            [](Settings& s, std::string_view, std::string_view v) { s.experiment.data.csv.label_column = v; },
            [](const Settings& s) { return s.experiment.data.csv.label_column; }},
        Key{"data.positive_token", "label value mapped to class 1",
            [](Settings& s, std::string_view, std::string_view v) { s.experiment.data.csv.positive_token = v; },
            [](const Settings& s) { return s.experiment.data.csv.positive_token; }},
        Key{"data.drop_tokens", "rows containing any of these cells are removed",
            [](Settings& s, std::string_view, std::string_view v) {
                s.experiment.data.csv.drop_tokens = split_list(v);
            },
            [](const Settings& s) { return join(s.experiment.data.csv.drop_tokens); }},
        A2G_FIELD_SIZE("data.synth_samples", "synthetic rows", s.experiment.data.synth_samples),
        A2G_FIELD_SIZE("data.synth_dim", "synthetic features", s.experiment.data.synth_dim),
        A2G_FIELD_DOUBLE("data.synth_separation", "distance between the two cluster centers",
                         s.experiment.data.synth_separation),
        A2G_FIELD_SIZE("data.pca_dim", "principal components kept; 0 = no reduction", s.experiment.data.pca_dim),
        A2G_FIELD_DOUBLE("data.test_fraction", "held-out share", s.experiment.data.test_fraction),

        Key{"partition.scheme", "iid | label_skew | quantity_skew",
            [](Settings& s, std::string_view k, std::string_view v) {
                const auto scheme = parse_partition_scheme(v);
                if (!scheme) throw ConfigError(std::string(k), "unknown scheme '" + std::string(v) + "'");
                s.experiment.partition.scheme = *scheme;
            },
            [](const Settings& s) { return std::string(to_string(s.experiment.partition.scheme)); }},
        A2G_FIELD_SIZE("partition.min_shard", "smallest allowed shard", s.experiment.partition.min_shard),
        A2G_FIELD_SIZE("partition.quantity_low", "quantity skew: smallest shard", s.experiment.partition.quantity_low),
        A2G_FIELD_SIZE("partition.quantity_high", "quantity skew: largest shard", s.experiment.partition.quantity_high),
        A2G_FIELD_DOUBLE("partition.skew_bias", "label skew: preferred-label share", s.experiment.partition.skew_bias),

        A2G_FIELD_DOUBLE("aggregation.eta", "gradient step size", s.experiment.aggregation.eta),
        A2G_FIELD_DOUBLE("aggregation.beta", "geometry gain in [0, 1]", s.experiment.aggregation.beta),
        A2G_FIELD_DOUBLE("aggregation.alpha", "fidelity exponent", s.experiment.aggregation.gains.alpha),
        A2G_FIELD_DOUBLE("aggregation.gamma", "latency exponent", s.experiment.aggregation.gains.gamma),
        A2G_FIELD_DOUBLE("aggregation.delta", "instability exponent", s.experiment.aggregation.gains.delta),
        A2G_FIELD_DOUBLE("aggregation.epsilon", "regularizer in the QoS factor", s.experiment.aggregation.gains.epsilon),
        Key{"aggregation.preset", "fedavg (alpha=gamma=delta=0, beta=1) | qos (alpha=gamma=delta=1)",
            [](Settings& s, std::string_view k, std::string_view v) {
                auto& a = s.experiment.aggregation;
                if (v == "fedavg") {
                    a.gains.alpha = a.gains.gamma = a.gains.delta = 0.0;
                    a.beta = 1.0;
                } else if (v == "qos") {
                    a.gains.alpha = a.gains.gamma = a.gains.delta = 1.0;
                } else {
                    throw ConfigError(std::string(k), "expected fedavg or qos, got '" + std::string(v) + "'");
                }
            },
            {}},

        Key{"channel.noise", "low | medium | high; sets channel.flip_prob",
            [](Settings& s, std::string_view k, std::string_view v) {
                const auto p = noise_preset(v);
                if (!p) throw ConfigError(std::string(k), "expected low, medium or high, got '" + std::string(v) + "'");
                s.experiment.channel.flip_prob = *p;
            },
            {}},
        A2G_FIELD_DOUBLE("channel.flip_prob", "bit-flip probability p", s.experiment.channel.flip_prob),
        Key{"channel.client_flip_probs", "per-client p; empty = channel.flip_prob for all",
            [](Settings& s, std::string_view k, std::string_view v) {
                std::vector<double> probs;
                for (const auto& item : split_list(v)) probs.push_back(to_double(k, item));
                s.experiment.client_flip_probs = std::move(probs);
            },
            [](const Settings& s) {
                std::vector<std::string> items;
                for (double p : s.experiment.client_flip_probs) items.push_back(fmt_double(p));
                return join(items);
            }},
        A2G_FIELD_SIZE("channel.trials", "Bernoulli trials per fidelity sample", s.experiment.channel.trials_per_round),
        A2G_FIELD_DOUBLE("channel.latency_log_mean", "mean of log latency", s.experiment.channel.latency_log_mean),
        A2G_FIELD_DOUBLE("channel.latency_log_sigma", "std of log latency", s.experiment.channel.latency_log_sigma),
        A2G_FIELD_DOUBLE("channel.tau_max", "latency cap (s)", s.experiment.channel.tau_max),
        A2G_FIELD_DOUBLE("channel.s_max", "instability cap", s.experiment.channel.s_max),
        A2G_FIELD_SIZE("channel.instability_window", "losses in the rolling variance",
                       s.experiment.channel.instability_window),

        A2G_FIELD_DOUBLE("spsa.a0", "step gain", s.experiment.spsa.a0),
        A2G_FIELD_DOUBLE("spsa.c0", "perturbation gain", s.experiment.spsa.c0),
        A2G_FIELD_DOUBLE("spsa.stability_offset", "A in the step schedule; negative = 10% of steps",
                         s.experiment.spsa.stability_offset),
        A2G_FIELD_DOUBLE("spsa.alpha_exp", "step decay exponent", s.experiment.spsa.alpha_exp),
        A2G_FIELD_DOUBLE("spsa.gamma_exp", "perturbation decay exponent", s.experiment.spsa.gamma_exp),
        A2G_FIELD_SIZE("spsa.steps_per_round", "local steps per round", s.experiment.spsa.steps_per_round),

        Key{"sweep.axis", "beta | noise | partition",
            [](Settings& s, std::string_view k, std::string_view v) {
                const auto axis = parse_sweep_axis(v);
                if (!axis) throw ConfigError(std::string(k), "expected beta, noise or partition, got '" + std::string(v) + "'");
                s.sweep_axis = *axis;
            },
            [](const Settings& s) { return std::string(to_string(s.sweep_axis)); }},
        Key{"sweep.values", "comma-separated values for the sweep axis",
            [](Settings& s, std::string_view, std::string_view v) { s.sweep_values = split_list(v); },
            [](const Settings& s) { return join(s.sweep_values); }},
    };
    return table;
}

#undef A2G_FIELD_DOUBLE
#undef A2G_FIELD_SIZE
#undef A2G_FIELD_UNSIGNED

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.emplace_back(trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void apply_setting(Settings& settings, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    for (const auto& k : keys()) {
        if (k.name == key) {
            k.set(settings, key, value);
            return;
        }
    }
    throw ConfigError(std::string(key), "unknown key");
}

void apply_config_text(Settings& settings, std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        }
        apply_setting(settings, line.substr(0, eq), line.substr(eq + 1));
    }
}

Settings load_settings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    Settings s;
    apply_config_text(s, buf.str());
    return s;
}

std::string render_settings(const Settings& settings) {
    std::string out;
    for (const auto& k : keys()) {
        if (!k.get) continue;
        const std::string value = k.get(settings);
        out += k.name;
        out += value.empty() ? " =" : " = " + value;
        out += '\n';
    }
    return out;
}

std::string describe_keys() {
    std::string out;
    for (const auto& k : keys()) {
        out += k.name;
        out.append(k.name.size() < 30 ? 30 - k.name.size() : 1, ' ');
        out += k.help;
        out += '\n';
    }
    return out;
}

}  // namespace a2g
