#include "a2g/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <vector>

#include "a2g/config.hpp"
#include "a2g/digest.hpp"
#include "a2g/errors.hpp"
#include "a2g/results.hpp"
#include "a2g/selftest.hpp"

namespace a2g {

std::optional<unsigned> parse_thread_count(const char* text) {
    if (text == nullptr || *text == '\0') return std::nullopt;
    const std::string_view s(text);
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
        throw ConfigError("A2G_THREADS", "expected a positive integer, got '" + std::string(s) + "'");
    }
    return v;
}

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "results";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App& cmd, CommonArgs& args, bool with_output) {
    cmd.add_option("-c,--config", args.config_path, "key = value config file");
    if (with_output) cmd.add_option("-o,--out", args.out_dir, "output directory")->capture_default_str();
    cmd.add_option("-s,--seed", args.seed, "overrides experiment.master_seed");
    cmd.add_option("overrides", args.overrides, "section.key=value overrides");
}

Settings resolve(const CommonArgs& args) {
    Settings s = args.config_path.empty() ? Settings{} : load_settings(args.config_path);
    for (const auto& o : args.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError(o, "override must look like key=value");
        apply_setting(s, std::string_view(o).substr(0, eq), std::string_view(o).substr(eq + 1));
    }
    if (args.seed) s.experiment.master_seed = *args.seed;
    s.experiment.validate();
    return s;
}

RunOptions run_options() {
    RunOptions opts;
    opts.threads = parse_thread_count(std::getenv("A2G_THREADS")).value_or(0);
    return opts;
}

RunOutput make_output(const Settings& resolved, std::string axis_value, RunSummary summary) {
    const std::string text = render_settings(resolved);
    return {make_run_id(text, resolved.experiment.master_seed), std::move(axis_value),
            sha256_hex(text), std::move(summary), {}};
}

void emit(const std::filesystem::path& dir, const Settings& resolved,
          const std::vector<RunOutput>& runs, std::string_view axis) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "config.resolved", render_settings(resolved));
    write_text_file(dir / "rounds.csv", rounds_csv(runs));
    write_text_file(dir / "summary.csv", summary_csv(runs));
    write_text_file(dir / "summary.json", summary_json(runs, axis));
}

int cmd_run(const CommonArgs& args, std::ostream& out) {
    const Settings s = resolve(args);
    const RunOptions opts = run_options();
    RunSummary summary = run_experiment(s.experiment, opts);
    std::vector<RunOutput> runs{make_output(s, "", std::move(summary))};
    emit(args.out_dir, s, runs, "");
    const auto& r = runs.front();
    out << "run " << r.run_id << ": " << r.summary.epochs << " rounds, best "
        << format_number(r.summary.best_accuracy) << ", final "
        << format_number(r.summary.final_accuracy) << ", mean last 5 "
        << format_number(r.summary.mean_accuracy_last5) << '\n'
        << "wrote " << args.out_dir << '\n';
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis_arg, const std::string& values_arg,
              std::ostream& out, std::ostream& err) {
    CommonArgs merged = args;
    if (!axis_arg.empty()) merged.overrides.push_back("sweep.axis=" + axis_arg);
    if (!values_arg.empty()) merged.overrides.push_back("sweep.values=" + values_arg);
    const Settings s = resolve(merged);
    if (s.sweep_values.empty()) throw ConfigError("sweep.values", "must not be empty");
    // Reject bad values before any experiment runs.
    for (const auto& v : s.sweep_values) (void)apply_sweep_value(s.experiment, s.sweep_axis, v);

    const auto results = sweep(s.experiment, s.sweep_axis, s.sweep_values, run_options());
    std::vector<RunOutput> runs;
    bool failed = false;
    for (const auto& r : results) {
        Settings per_run = s;
        if (r.config) per_run.experiment = *r.config;
        RunOutput o = make_output(per_run, r.value, r.summary.value_or(RunSummary{}));
        o.error = r.error;
        if (!r.error.empty()) {
            failed = true;
            err << "value " << r.value << " failed: " << r.error << '\n';
        } else {
            out << to_string(s.sweep_axis) << '=' << r.value << "  run " << o.run_id << "  best "
                << format_number(o.summary.best_accuracy) << "  final "
                << format_number(o.summary.final_accuracy) << "  mean last 5 "
                << format_number(o.summary.mean_accuracy_last5) << '\n';
        }
        runs.push_back(std::move(o));
    }
    emit(args.out_dir, s, runs, to_string(s.sweep_axis));
    out << "wrote " << args.out_dir << '\n';
    return failed ? kExitRuntime : kExitOk;
}

int cmd_partition_report(const CommonArgs& args, std::ostream& out) {
    const Settings s = resolve(args);
    const PreparedExperiment prep = prepare_experiment(s.experiment);
    out << "client,size,label0,label1\n";
    for (std::size_t i = 0; i < prep.shards.size(); ++i) {
        const auto counts = prep.shards[i].label_counts();
        out << i + 1 << ',' << prep.shards[i].size() << ',' << counts[0] << ',' << counts[1] << '\n';
    }
    const auto test_counts = prep.test.label_counts();
    out << "test," << prep.test.size() << ',' << test_counts[0] << ',' << test_counts[1] << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Federated learning with QoS-weighted, geometry-aware aggregation"};
    app.require_subcommand(1);
    app.footer("Config keys:\n" + describe_keys());

    CommonArgs run_args, sweep_args, report_args;
    std::string axis, values;

    auto* run = app.add_subcommand("run", "run one experiment and write CSV/JSON results");
    add_common(*run, run_args, true);
    auto* sw = app.add_subcommand("sweep", "run one experiment per value of an axis");
    add_common(*sw, sweep_args, true);
    sw->add_option("--axis", axis, "beta | noise | partition");
    sw->add_option("--values", values, "comma-separated axis values");
    auto* report = app.add_subcommand("partition-report", "print per-client shard sizes and label counts");
    add_common(*report, report_args, false);
    auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_args, out);
        if (*sw) return cmd_sweep(sweep_args, axis, values, out, err);
        if (*report) return cmd_partition_report(report_args, out);
        if (*self) return run_selftest(out) ? kExitOk : kExitSelftest;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}

}  // namespace a2g
