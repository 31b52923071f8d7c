#ifndef KS2_SOLVER_HPP
#define KS2_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ks2/errors.hpp"
#include "ks2/frame.hpp"
#include "ks2/linalg.hpp"

namespace ks2 {

enum class Algorithm { BarrierGreedy, PlainGreedy };
enum class TieBreak { LowestIndex };
enum class OddMPolicy { Reject, LargerFirstSet };
enum class TraceLevel { Full, SpectralOnly, Off };

inline const char* to_string(Algorithm a) {
    return a == Algorithm::BarrierGreedy ? "barrier" : "plain";
}
inline const char* to_string(TraceLevel t) {
    switch (t) {
        case TraceLevel::Full: return "full";
        case TraceLevel::SpectralOnly: return "spectral";
        default: return "off";
    }
}

struct SolverConfig {
    Algorithm algorithm = Algorithm::BarrierGreedy;
    TieBreak tie_break = TieBreak::LowestIndex;
    OddMPolicy odd_m_policy = OddMPolicy::Reject;
    TraceLevel record_trace = TraceLevel::Full;
    std::size_t candidate_parallelism = 1;  // 0 = auto
};

constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

/// State after iteration j (barrier u is the value in effect for A_{j+1}).
struct IterationRecord {
    std::size_t j = 0;
    std::size_t chosen = kNoIndex;
    double u = 0.0;
    double q_value = std::numeric_limits<double>::quiet_NaN();
    double potential = 0.0;    // Phi^u(A_{j+1}) = -log det(u I - A_{j+1})
    double gap_c = 0.0;        // u - lambda_max(A_{j+1})
    double kappa_shift = 0.0;  // kappa(u I - A_{j+1})
    double trace_shift = 0.0;  // tr(u I - A_{j+1})
};

struct PartitionResult {
    std::vector<std::size_t> s1;  // chosen indices, sorted
    std::vector<std::size_t> s2;  // complement, sorted
    std::vector<IterationRecord> trace;
    SolverConfig config;
    std::string frame_fingerprint;
};

namespace detail {

inline std::vector<double> candidate_forms(const CholeskyFactor& factor,
                                           const std::vector<std::size_t>& candidates,
                                           const Frame& f, std::size_t parallelism) {
    std::vector<double> q(candidates.size());
    const std::size_t n = candidates.size();
    std::size_t workers = parallelism == 0 ? std::thread::hardware_concurrency() : parallelism;
    if (workers == 0) workers = 1;
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k)
            q[k] = quadratic_form_inverse(factor, f.vectors[candidates[k]]);
        return q;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t k = w; k < n; k += workers)
                q[k] = quadratic_form_inverse(factor, f.vectors[candidates[k]]);
        });
    }
    for (auto& t : pool) t.join();
    return q;
}

}  // namespace detail

/// Picks the candidate minimizing v* M^{-1} v. Ties (absolute difference
/// <= 1e-12) go to the lowest index; the result does not depend on the
/// evaluation schedule.
inline std::pair<std::size_t, double> select_next(const std::vector<std::size_t>& candidates,
                                                  const HermitianMatrix& m, const Frame& f,
                                                  std::size_t parallelism = 1) {
    if (candidates.empty()) throw InvalidFrame("no candidates to select from");
    auto factor = cholesky(m);
    if (!factor) throw NotPositiveDefinite("shifted matrix lost positive definiteness");
    const auto q = detail::candidate_forms(*factor, candidates, f, parallelism);
    double best = q[0];
    for (double v : q) best = std::min(best, v);
    for (std::size_t k = 0; k < q.size(); ++k)
        if (q[k] <= best + 1e-12) return {candidates[k], q[k]};
    return {candidates[0], q[0]};  // unreachable
}

namespace detail {

inline IterationRecord make_record(std::size_t j, std::size_t chosen, double u, double q,
                                   const HermitianMatrix& a_next, TraceLevel level) {
    IterationRecord rec;
    rec.j = j;
    rec.u = u;
    if (level == TraceLevel::Full) {
        rec.chosen = chosen;
        rec.q_value = q;
    }
    const auto lam = hermitian_eigenvalues(a_next);
    const double lam_max = lam.front();
    const double lam_min = lam.back();
    rec.gap_c = u - lam_max;
    rec.kappa_shift = (u - lam_min) / (u - lam_max);
    rec.trace_shift = u * static_cast<double>(a_next.dim()) - a_next.trace();
    double pot = 0.0;
    for (double l : lam) pot -= std::log(u - l);
    rec.potential = pot;
    return rec;
}

inline PartitionResult run_greedy(const Frame& f, const SolverConfig& cfg) {
    const ValidationReport rep = validate_frame(f);
    if (!rep.pass) throw InvalidFrame("solver input fails frame validation");
    std::size_t iterations = f.m / 2;
    if (f.m % 2 != 0) {
        if (cfg.odd_m_policy == OddMPolicy::Reject)
            throw InvalidFrame("m is odd; enable LargerFirstSet to proceed");
        iterations = (f.m + 1) / 2;
    }

    const bool barrier = cfg.algorithm == Algorithm::BarrierGreedy;
    const double delta_u = barrier ? f.alpha / static_cast<double>(f.d) : 0.0;
    const double u0 = barrier ? 0.5 : 1.0;

    PartitionResult result;
    result.config = cfg;
    result.frame_fingerprint = frame_fingerprint(f);

    std::vector<std::size_t> candidates(f.m);
    for (std::size_t i = 0; i < f.m; ++i) candidates[i] = i;
    HermitianMatrix a = HermitianMatrix::zero(f.d);
    std::vector<std::size_t> chosen_set;
    chosen_set.reserve(iterations);

    for (std::size_t j = 0; j < iterations; ++j) {
        const double u_next = u0 + delta_u * static_cast<double>(j + 1);
        const HermitianMatrix m = a.shifted(u_next);
        std::size_t pick;
        double q;
        try {
            std::tie(pick, q) = select_next(candidates, m, f, cfg.candidate_parallelism);
        } catch (const NotPositiveDefinite&) {
            throw BarrierBreach(j);
        }
        if (!(q < 1.0)) throw BarrierBreach(j);
        a = a.add_outer(f.vectors[pick]);
        candidates.erase(std::find(candidates.begin(), candidates.end(), pick));
        chosen_set.push_back(pick);
        if (cfg.record_trace != TraceLevel::Off)
            result.trace.push_back(make_record(j, pick, u_next, q, a, cfg.record_trace));
    }

    result.s1 = std::move(chosen_set);
    std::sort(result.s1.begin(), result.s1.end());
    result.s2 = std::move(candidates);
    return result;
}

}  // namespace detail

/// Algorithm with moving barrier: u_0 = 1/2, delta_u = alpha/d, each step
/// maximizes det(u_{j+1} I - A_j - v v*) via the quadratic-form reduction.
inline PartitionResult run_barrier_greedy(const Frame& f, SolverConfig cfg = {}) {
    cfg.algorithm = Algorithm::BarrierGreedy;
    return detail::run_greedy(f, cfg);
}

/// Fixed barrier 1: each step minimizes v* (I - A_j)^{-1} v.
inline PartitionResult run_plain_greedy(const Frame& f, SolverConfig cfg = {}) {
    cfg.algorithm = Algorithm::PlainGreedy;
    return detail::run_greedy(f, cfg);
}

}  // namespace ks2

#endif
