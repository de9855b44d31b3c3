#include "a2g/results.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "a2g/digest.hpp"

namespace a2g {

std::string make_run_id(std::string_view resolved_config, std::uint64_t master_seed) {
    std::string material(resolved_config);
    material += "seed=" + std::to_string(master_seed);
    return sha256_hex(material).substr(0, 12);
}

std::string format_number(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::string rounds_csv(const std::vector<RunOutput>& runs) {
    std::size_t k = 0;
    for (const auto& run : runs) {
        for (const auto& r : run.summary.records) k = std::max(k, r.weights.size());
    }
    std::string out =
        "run_id,round,test_accuracy,global_loss,mean_fidelity,mean_latency,mean_instability,"
        "dispersion,grad_norm";
    for (std::size_t i = 1; i <= k; ++i) out += ",w_" + std::to_string(i);
    out += '\n';
    for (const auto& run : runs) {
        for (const auto& r : run.summary.records) {
            out += run.run_id;
            out += ',' + std::to_string(r.round);
            for (double v : {r.test_accuracy, r.global_loss, r.mean_fidelity, r.mean_latency,
                             r.mean_instability, r.dispersion, r.grad_norm}) {
                out += ',' + format_number(v);
            }
            for (std::size_t i = 0; i < k; ++i) {
                out += ',';
                if (i < r.weights.size()) out += format_number(r.weights[i]);
            }
            out += '\n';
        }
    }
    return out;
}

std::string summary_csv(const std::vector<RunOutput>& runs) {
    std::string out = "run_id,axis_value,epochs,best_acc,final_acc,mean_acc_last5\n";
    for (const auto& run : runs) {
        if (!run.error.empty()) continue;
        const auto& s = run.summary;
        out += run.run_id + ',' + run.axis_value + ',' + std::to_string(s.epochs) + ',' +
               format_number(s.best_accuracy) + ',' + format_number(s.final_accuracy) + ',' +
               format_number(s.mean_accuracy_last5) + '\n';
    }
    return out;
}

std::string summary_json(const std::vector<RunOutput>& runs, std::string_view axis) {
    nlohmann::ordered_json doc;
    doc["axis"] = std::string(axis);
    doc["runs"] = nlohmann::ordered_json::array();
    for (const auto& run : runs) {
        nlohmann::ordered_json j;
        j["run_id"] = run.run_id;
        j["axis_value"] = run.axis_value;
        j["epochs"] = run.summary.epochs;
        j["best_acc"] = run.summary.best_accuracy;
        j["final_acc"] = run.summary.final_accuracy;
        j["mean_acc_last5"] = run.summary.mean_accuracy_last5;
        j["config_digest"] = run.config_digest;
        if (!run.error.empty()) j["error"] = run.error;
        doc["runs"].push_back(std::move(j));
    }
    return doc.dump(2) + '\n';
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace a2g
