#ifndef KS2_IO_HPP
#define KS2_IO_HPP

#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ks2/diagnostics.hpp"
#include "ks2/errors.hpp"
#include "ks2/frame.hpp"
#include "ks2/solver.hpp"

namespace ks2 {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string command;
    std::string frame_fingerprint;
    std::string tool_version = kToolVersion;
    std::vector<std::uint64_t> seeds;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json timing = nlohmann::json::object();  // excluded from determinism checks
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["frame_fingerprint"] = m.frame_fingerprint;
    j["tool_version"] = m.tool_version;
    j["seeds"] = m.seeds;
    j["config"] = m.config;
    j["timing"] = m.timing;
    return j;
}

inline nlohmann::json config_to_json(const SolverConfig& cfg) {
    nlohmann::json j;
    j["algorithm"] = to_string(cfg.algorithm);
    j["tie_break"] = "lowest-index";
    j["odd_m_policy"] = cfg.odd_m_policy == OddMPolicy::Reject ? "reject" : "larger-first-set";
    j["trace"] = to_string(cfg.record_trace);
    j["candidate_parallelism"] = cfg.candidate_parallelism;
    return j;
}

// -inf (singular I - A) serializes as null
inline nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline nlohmann::json record_to_json(const IterationRecord& r) {
    nlohmann::json j;
    j["j"] = r.j;
    if (r.chosen != kNoIndex) j["chosen"] = r.chosen;
    j["u"] = r.u;
    if (!std::isnan(r.q_value)) j["q"] = r.q_value;
    j["potential"] = r.potential;
    j["gap_c"] = r.gap_c;
    j["kappa_shift"] = finite_or_null(r.kappa_shift);
    j["trace_shift"] = r.trace_shift;
    return j;
}

inline nlohmann::json spectral_report_to_json(const SpectralReport& r) {
    nlohmann::json j;
    j["lambda_min_A"] = r.lambda_min_A;
    j["lambda_max_A"] = r.lambda_max_A;
    j["lambda_min_IA"] = r.lambda_min_IA;
    j["lambda_max_IA"] = r.lambda_max_IA;
    j["theta"] = r.theta;
    j["kappa_IA"] = finite_or_null(r.kappa_IA);
    j["x_bound"] = r.x_bound;
    j["kappa_upper"] = finite_or_null(r.kappa_upper);
    j["logdet_IA"] = finite_or_null(r.logdet_IA);
    j["logdet_floor"] = r.logdet_floor;
    j["guarantee"] = to_string(r.guarantee);
    return j;
}

inline nlohmann::json margins_to_json(const MarginSummary& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : m.entries) {
        nlohmann::json j;
        j["name"] = e.name;
        j["value"] = finite_or_null(e.value);
        j["threshold"] = e.threshold;
        j["slack"] = finite_or_null(e.slack);
        j["applicable"] = e.applicable;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline nlohmann::json result_to_json(const RunManifest& manifest, const PartitionResult& result,
                                     const SpectralReport& report, const MarginSummary& margins) {
    nlohmann::json j;
    j["manifest"] = manifest_to_json(manifest);
    j["s1"] = result.s1;
    j["s2"] = result.s2;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& rec : result.trace) trace.push_back(record_to_json(rec));
    j["trace"] = std::move(trace);
    j["spectral_report"] = spectral_report_to_json(report);
    j["margins"] = margins_to_json(margins);
    return j;
}

/// Loads the parts of a result document needed for independent verification.
inline PartitionResult result_from_json(const nlohmann::json& j) {
    PartitionResult r;
    r.frame_fingerprint = j.at("manifest").at("frame_fingerprint").get<std::string>();
    r.s1 = j.at("s1").get<std::vector<std::size_t>>();
    r.s2 = j.at("s2").get<std::vector<std::size_t>>();
    const auto& cfg = j.at("manifest").at("config");
    r.config.algorithm = cfg.at("algorithm").get<std::string>() == "barrier"
                             ? Algorithm::BarrierGreedy
                             : Algorithm::PlainGreedy;
    const std::string trace = cfg.at("trace").get<std::string>();
    r.config.record_trace = trace == "full" ? TraceLevel::Full
                          : trace == "spectral" ? TraceLevel::SpectralOnly
                                                : TraceLevel::Off;
    for (const auto& jr : j.at("trace")) {
        IterationRecord rec;
        rec.j = jr.at("j").get<std::size_t>();
        if (jr.contains("chosen")) rec.chosen = jr.at("chosen").get<std::size_t>();
        rec.u = jr.at("u").get<double>();
        if (jr.contains("q")) rec.q_value = jr.at("q").get<double>();
        rec.potential = jr.at("potential").get<double>();
        rec.gap_c = jr.at("gap_c").get<double>();
        rec.kappa_shift = jr.at("kappa_shift").is_null()
                              ? std::numeric_limits<double>::infinity()
                              : jr.at("kappa_shift").get<double>();
        rec.trace_shift = jr.at("trace_shift").get<double>();
        r.trace.push_back(rec);
    }
    return r;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace ks2

#endif
