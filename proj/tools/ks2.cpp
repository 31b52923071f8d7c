// Command-line front end: generate KS2 instances, run the two greedy
// partition algorithms, verify the spectral guarantees, compare against the
// brute-force oracle, and benchmark.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ks2/diagnostics.hpp"
#include "ks2/errors.hpp"
#include "ks2/frame.hpp"
#include "ks2/io.hpp"
#include "ks2/oracle.hpp"
#include "ks2/solver.hpp"

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ks2::Frame make_frame(std::size_t d, std::size_t m, const std::string& kind,
                      std::uint64_t seed, const std::vector<std::string>& inputs) {
    if (kind == "harmonic") return ks2::harmonic_frame(d, m);
    if (kind == "rotated") return ks2::rotate_frame(ks2::harmonic_frame(d, m), seed);
    if (kind == "phased") return ks2::random_phase_frame(ks2::harmonic_frame(d, m), seed);
    if (kind == "direct-sum") {
        if (inputs.size() != 2)
            throw ks2::InvalidFrame("direct-sum needs exactly two --in paths");
        return ks2::direct_sum(ks2::deserialize_frame(ks2::read_file(inputs[0])),
                               ks2::deserialize_frame(ks2::read_file(inputs[1])));
    }
    throw ks2::InvalidFrame("unknown kind: " + kind);
}

json validation_to_json(const ks2::ValidationReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["parseval_deviation"] = rep.parseval_deviation;
    j["max_norm_deviation"] = rep.max_norm_deviation;
    j["trace_identity_gap"] = rep.trace_identity_gap;
    j["m_even"] = rep.m_even;
    j["regime"] = ks2::to_string(rep.regime);
    return j;
}

struct SolveArtifacts {
    ks2::PartitionResult result;
    ks2::SpectralReport report;
    ks2::MarginSummary margins;
    double wall_seconds = 0.0;
};

SolveArtifacts run_solver(const ks2::Frame& frame, const ks2::SolverConfig& cfg) {
    SolveArtifacts art;
    const auto t0 = std::chrono::steady_clock::now();
    art.result = cfg.algorithm == ks2::Algorithm::BarrierGreedy
                     ? ks2::run_barrier_greedy(frame, cfg)
                     : ks2::run_plain_greedy(frame, cfg);
    art.wall_seconds = seconds_since(t0);
    art.report = ks2::spectral_report(frame, art.result);
    art.margins = ks2::guarantee_margin(art.report, ks2::classify_regime(frame.d, frame.m));
    return art;
}

int exit_code_for(ks2::GuaranteeVerdict v) {
    switch (v) {
        case ks2::GuaranteeVerdict::Pass34: return 0;
        case ks2::GuaranteeVerdict::Fail: return 2;
        default: return 4;
    }
}

int cmd_generate(std::size_t d, std::size_t m, const std::string& kind, std::uint64_t seed,
                 const std::vector<std::string>& inputs, const std::string& out) {
    const ks2::Frame frame = make_frame(d, m, kind, seed, inputs);
    const auto rep = ks2::validate_frame(frame);
    if (!rep.pass) {
        std::cerr << "generated frame fails validation\n";
        return 1;
    }
    ks2::write_file(out, ks2::serialize_frame(frame));
    json doc;
    doc["command"] = "generate";
    doc["d"] = frame.d;
    doc["m"] = frame.m;
    doc["alpha"] = frame.alpha;
    doc["kind"] = kind;
    doc["seed"] = seed;
    doc["out"] = out;
    doc["fingerprint"] = ks2::frame_fingerprint(frame);
    doc["validation"] = validation_to_json(rep);
    doc["regime"] = ks2::to_string(rep.regime);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_solve(const std::string& frame_path, const ks2::SolverConfig& cfg,
              std::uint64_t, const std::string& out, const std::string& command_echo) {
    const ks2::Frame frame = ks2::deserialize_frame(ks2::read_file(frame_path));
    ks2::RunManifest manifest;
    manifest.command = command_echo;
    manifest.frame_fingerprint = ks2::frame_fingerprint(frame);
    manifest.config = ks2::config_to_json(cfg);

    SolveArtifacts art;
    try {
        art = run_solver(frame, cfg);
    } catch (const ks2::BarrierBreach& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    manifest.timing["solve_seconds"] = art.wall_seconds;
    const json doc = ks2::result_to_json(manifest, art.result, art.report, art.margins);
    if (!out.empty()) ks2::write_file(out, doc.dump(2));
    std::cout << doc.dump(2) << "\n";
    return exit_code_for(art.report.guarantee);
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_verify(const std::string& frame_path, const std::string& result_path) {
    const ks2::Frame frame = ks2::deserialize_frame(ks2::read_file(frame_path));
    const json rj = json::parse(ks2::read_file(result_path));
    const ks2::PartitionResult result = ks2::result_from_json(rj);

    if (result.frame_fingerprint != ks2::frame_fingerprint(frame))
        throw ks2::FingerprintMismatch("result was produced from a different frame");

    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool pass, const std::string& detail = "") {
        checks.push_back({name, pass, detail});
    };

    const auto report = ks2::spectral_report(frame, result);
    add("guarantee_verdict", report.guarantee != ks2::GuaranteeVerdict::Fail,
        ks2::to_string(report.guarantee));
    const bool regime_ok = ks2::regime_covers(ks2::classify_regime(frame.d, frame.m),
                                              result.config.algorithm);
    if (regime_ok)
        add("logdet_floor", report.logdet_IA >= report.logdet_floor - 1e-6);

    const double d = static_cast<double>(frame.d);
    const bool barrier = result.config.algorithm == ks2::Algorithm::BarrierGreedy;
    if (!result.trace.empty()) {
        bool trace_const = true, gap_pos = true, potential_ok = true;
        double prev_potential = d * std::log(2.0);  // Phi^{1/2}(0)
        double prev_gap = 0.5;
        for (const auto& rec : result.trace) {
            gap_pos = gap_pos && rec.gap_c > 0.0;
            if (barrier) {
                trace_const = trace_const && std::abs(rec.trace_shift - d / 2.0) <= 1e-9 * d;
                const double bound = 2.0 * frame.alpha * frame.alpha / (prev_gap * prev_gap);
                potential_ok =
                    potential_ok && rec.potential - prev_potential <= bound + 1e-9;
            }
            prev_potential = rec.potential;
            prev_gap = rec.gap_c;
        }
        add("gap_positive", gap_pos);
        if (barrier) {
            add("trace_invariant", trace_const);
            add("potential_increase_bound", potential_ok);
        }

        // full traces replay both the recorded state and the selection rule
        if (result.config.record_trace == ks2::TraceLevel::Full && frame.m <= 512) {
            bool avg_ok = true, mdl_ok = true;
            if (!barrier) {
                ks2::HermitianMatrix a = ks2::HermitianMatrix::zero(frame.d);
                std::vector<std::size_t> remaining(frame.m);
                for (std::size_t i = 0; i < frame.m; ++i) remaining[i] = i;
                double logdet = 0.0;  // log det(I - A_0)
                for (const auto& rec : result.trace) {
                    const auto factor = ks2::cholesky(a.shifted(1.0));
                    if (!factor) {
                        avg_ok = false;
                        break;
                    }
                    double sum = 0.0;
                    for (std::size_t c : remaining)
                        sum += ks2::quadratic_form_inverse(*factor, frame.vectors[c]);
                    avg_ok = avg_ok && std::abs(sum - d) <= 1e-6;
                    const double cap =
                        d / static_cast<double>(frame.m - rec.j) + 1e-9;
                    avg_ok = avg_ok && rec.q_value <= cap;
                    logdet += std::log(1.0 - rec.q_value);
                    remaining.erase(
                        std::find(remaining.begin(), remaining.end(), rec.chosen));
                    a = a.add_outer(frame.vectors[rec.chosen]);
                    mdl_ok = mdl_ok &&
                             std::abs(ks2::log_det(a.shifted(1.0)) - logdet) <= 1e-8;
                }
                add("average_form_identity", avg_ok);
                add("determinant_accounting", mdl_ok);
            }
            const auto replay = ks2::verify_selection_trace(frame, result);
            add("selection_replay", replay.all_pass);
        }
    }

    json doc;
    doc["command"] = "verify";
    doc["frame_fingerprint"] = result.frame_fingerprint;
    bool all = true;
    json arr = json::array();
    for (const auto& c : checks) {
        json j;
        j["name"] = c.name;
        j["pass"] = c.pass;
        if (!c.detail.empty()) j["detail"] = c.detail;
        arr.push_back(std::move(j));
        all = all && c.pass;
    }
    doc["checks"] = std::move(arr);
    doc["pass"] = all;
    std::cout << doc.dump(2) << "\n";
    return all ? 0 : 1;
}

int cmd_compare(const std::string& frame_path, std::uint64_t cap, std::uint64_t seed) {
    const ks2::Frame frame = ks2::deserialize_frame(ks2::read_file(frame_path));
    json rows = json::array();

    auto spectral_row = [&](const std::string& name, const std::vector<std::size_t>& s1,
                            double wall, const ks2::SolverConfig& cfg) {
        ks2::PartitionResult pr;
        pr.s1 = s1;
        pr.s2.clear();
        std::vector<bool> in(frame.m, false);
        for (std::size_t i : s1) in[i] = true;
        for (std::size_t i = 0; i < frame.m; ++i)
            if (!in[i]) pr.s2.push_back(i);
        pr.config = cfg;
        const auto rep = ks2::spectral_report(frame, pr);
        json r;
        r["name"] = name;
        r["theta"] = rep.theta;
        r["lambda_min_A"] = rep.lambda_min_A;
        r["lambda_max_A"] = rep.lambda_max_A;
        r["logdet_IA"] = ks2::finite_or_null(rep.logdet_IA);
        r["wall_seconds"] = wall;
        r["guarantee"] = ks2::to_string(rep.guarantee);
        return r;
    };

    for (const auto alg : {ks2::Algorithm::BarrierGreedy, ks2::Algorithm::PlainGreedy}) {
        ks2::SolverConfig cfg;
        cfg.algorithm = alg;
        cfg.record_trace = ks2::TraceLevel::Off;
        try {
            const auto art = run_solver(frame, cfg);
            rows.push_back(
                spectral_row(ks2::to_string(alg), art.result.s1, art.wall_seconds, cfg));
        } catch (const ks2::BarrierBreach& e) {
            json r;
            r["name"] = ks2::to_string(alg);
            r["error"] = e.what();
            rows.push_back(std::move(r));
        }
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const auto oracle = ks2::brute_force_balanced(frame, cap);
        ks2::SolverConfig cfg;
        cfg.record_trace = ks2::TraceLevel::Off;
        auto row = spectral_row("oracle", oracle.best_partition, seconds_since(t0), cfg);
        row["evaluated_count"] = oracle.evaluated_count;
        rows.push_back(std::move(row));
    } catch (const ks2::CapExceeded& e) {
        json r;
        r["name"] = "oracle";
        r["omitted"] = e.what();
        rows.push_back(std::move(r));
    }

    {
        ks2::SplitMix64 rng(seed);
        std::vector<std::size_t> idx(frame.m);
        for (std::size_t i = 0; i < frame.m; ++i) idx[i] = i;
        for (std::size_t i = frame.m; i-- > 1;)
            std::swap(idx[i], idx[rng.next_below(i + 1)]);
        std::vector<std::size_t> s1(idx.begin(),
                                    idx.begin() + static_cast<std::ptrdiff_t>(frame.m / 2));
        std::sort(s1.begin(), s1.end());
        ks2::SolverConfig cfg;
        cfg.record_trace = ks2::TraceLevel::Off;
        rows.push_back(spectral_row("random-balanced", s1, 0.0, cfg));
    }

    json doc;
    doc["command"] = "compare";
    doc["fingerprint"] = ks2::frame_fingerprint(frame);
    doc["rows"] = std::move(rows);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

struct BenchCase {
    std::size_t d = 0, m = 0;
    std::string kind;
    std::uint64_t seed = 0;
    std::string algorithm;
};

BenchCase parse_case(const std::string& text) {
    BenchCase c;
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 5)
        throw std::runtime_error("bench case must be d,m,kind,seed,algorithm: " + text);
    c.d = std::stoul(parts[0]);
    c.m = std::stoul(parts[1]);
    c.kind = parts[2];
    c.seed = std::stoull(parts[3]);
    c.algorithm = parts[4];
    return c;
}

int cmd_bench(const std::vector<std::string>& case_specs, int repeats,
              const std::string& out) {
    std::string csv =
        "d,m,kind,seed,algorithm,iterations,wall_seconds,theta,lambda_min_A,lambda_max_A,"
        "x_bound,logdet_IA,guarantee\n";
    for (const auto& spec : case_specs) {
        const BenchCase c = parse_case(spec);
        for (int rep = 0; rep < repeats; ++rep) {
            std::string prefix = std::to_string(c.d) + "," + std::to_string(c.m) + "," +
                                 c.kind + "," + std::to_string(c.seed) + "," + c.algorithm;
            try {
                const ks2::Frame frame = make_frame(c.d, c.m, c.kind, c.seed, {});
                ks2::SolverConfig cfg;
                cfg.algorithm = c.algorithm == "barrier" ? ks2::Algorithm::BarrierGreedy
                                                         : ks2::Algorithm::PlainGreedy;
                cfg.record_trace = ks2::TraceLevel::Off;
                const auto art = run_solver(frame, cfg);
                char buf[256];
                std::snprintf(buf, sizeof(buf), ",%zu,%.6f,%.12g,%.12g,%.12g,%.12g,%.12g,%s\n",
                              art.result.s1.size(), art.wall_seconds, art.report.theta,
                              art.report.lambda_min_A, art.report.lambda_max_A,
                              art.report.x_bound, art.report.logdet_IA,
                              ks2::to_string(art.report.guarantee));
                csv += prefix + buf;
            } catch (const std::exception& e) {
                csv += prefix + ",,,,,,," + std::string(e.what()) + "\n";
            }
        }
    }
    if (!out.empty())
        ks2::write_file(out, csv);
    else
        std::cout << csv;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic greedy partitioning for Weaver-type discrepancy instances"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a frame instance");
    std::size_t g_d = 2, g_m = 8;
    std::string g_kind = "harmonic", g_out = "frame.json";
    std::uint64_t g_seed = 0;
    std::vector<std::string> g_in;
    gen->add_option("-d", g_d, "ambient dimension");
    gen->add_option("-m", g_m, "vector count");
    gen->add_option("--kind", g_kind)
        ->check(CLI::IsMember({"harmonic", "rotated", "phased", "direct-sum"}));
    gen->add_option("--seed", g_seed);
    gen->add_option("--in", g_in, "input frames for direct-sum");
    gen->add_option("--out", g_out);

    // solve
    auto* solve = app.add_subcommand("solve", "run a greedy partition algorithm");
    std::string s_frame, s_alg = "barrier", s_trace = "full", s_out;
    bool s_allow_odd = false;
    std::size_t s_par = 1;
    solve->add_option("frame", s_frame)->required();
    solve->add_option("--algorithm", s_alg)->check(CLI::IsMember({"barrier", "plain"}));
    solve->add_option("--trace", s_trace)->check(CLI::IsMember({"full", "spectral", "off"}));
    solve->add_flag("--allow-odd", s_allow_odd, "partition odd m with a larger first set");
    solve->add_option("--parallelism", s_par, "candidate evaluation threads (0 = auto)");
    solve->add_option("--out", s_out);

    // verify
    auto* verify = app.add_subcommand("verify", "re-check a result against its frame");
    std::string v_frame, v_result;
    verify->add_option("frame", v_frame)->required();
    verify->add_option("result", v_result)->required();

    // compare
    auto* compare = app.add_subcommand("compare", "compare solvers, oracle, random baseline");
    std::string c_frame;
    std::uint64_t c_cap = 2000000, c_seed = 1;
    compare->add_option("frame", c_frame)->required();
    compare->add_option("--cap", c_cap, "oracle enumeration cap");
    compare->add_option("--seed", c_seed, "random baseline seed");

    // bench
    auto* bench = app.add_subcommand("bench", "timing and margin sweep, CSV output");
    std::vector<std::string> b_cases;
    int b_repeats = 1;
    std::string b_out;
    bench->add_option("--case", b_cases, "d,m,kind,seed,algorithm");
    bench->add_option("--repeats", b_repeats);
    bench->add_option("--out", b_out);

    CLI11_PARSE(app, argc, argv);

    std::string command_echo;
    for (int i = 0; i < argc; ++i) {
        if (i) command_echo += ' ';
        command_echo += argv[i];
    }

    try {
        if (gen->parsed()) return cmd_generate(g_d, g_m, g_kind, g_seed, g_in, g_out);
        if (solve->parsed()) {
            ks2::SolverConfig cfg;
            cfg.algorithm =
                s_alg == "barrier" ? ks2::Algorithm::BarrierGreedy : ks2::Algorithm::PlainGreedy;
            cfg.record_trace = s_trace == "full" ? ks2::TraceLevel::Full
                             : s_trace == "spectral" ? ks2::TraceLevel::SpectralOnly
                                                     : ks2::TraceLevel::Off;
            cfg.odd_m_policy =
                s_allow_odd ? ks2::OddMPolicy::LargerFirstSet : ks2::OddMPolicy::Reject;
            cfg.candidate_parallelism = s_par;
            return cmd_solve(s_frame, cfg, 0, s_out, command_echo);
        }
        if (verify->parsed()) return cmd_verify(v_frame, v_result);
        if (compare->parsed()) return cmd_compare(c_frame, c_cap, c_seed);
        if (bench->parsed()) return cmd_bench(b_cases, b_repeats, b_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
