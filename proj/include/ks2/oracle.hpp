#ifndef KS2_ORACLE_HPP
#define KS2_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "ks2/errors.hpp"
#include "ks2/frame.hpp"
#include "ks2/linalg.hpp"
#include "ks2/solver.hpp"

namespace ks2 {

/// Explicit dense inverse by Gauss-Jordan with partial pivoting. Kept
/// independent of the Cholesky path so replay checks use different
/// machinery than the solver.
inline std::vector<Complex> explicit_inverse(const HermitianMatrix& a) {
    const std::size_t d = a.dim();
    std::vector<Complex> w(d * 2 * d, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) w[i * 2 * d + j] = a(i, j);
        w[i * 2 * d + d + i] = 1.0;
    }
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(w[r * 2 * d + col]) > std::abs(w[piv * 2 * d + col])) piv = r;
        if (std::abs(w[piv * 2 * d + col]) < 1e-300)
            throw NotPositiveDefinite("singular matrix in explicit inverse");
        if (piv != col)
            for (std::size_t c = 0; c < 2 * d; ++c)
                std::swap(w[piv * 2 * d + c], w[col * 2 * d + c]);
        const Complex p = w[col * 2 * d + col];
        for (std::size_t c = 0; c < 2 * d; ++c) w[col * 2 * d + c] /= p;
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            const Complex factor = w[r * 2 * d + col];
            if (factor == Complex{0.0, 0.0}) continue;
            for (std::size_t c = 0; c < 2 * d; ++c)
                w[r * 2 * d + c] -= factor * w[col * 2 * d + c];
        }
    }
    std::vector<Complex> inv(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) inv[i * d + j] = w[i * 2 * d + d + j];
    return inv;
}

/// v* Inv v with an imaginary-residue guard.
inline double quadratic_form_explicit(const std::vector<Complex>& inv, const CVector& v) {
    const std::size_t d = v.size();
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < d; ++i) {
        Complex row{0.0, 0.0};
        for (std::size_t j = 0; j < d; ++j) row += inv[i * d + j] * v[j];
        s += std::conj(v[i]) * row;
    }
    if (std::abs(s.imag()) > 1e-10 * std::abs(s.real()) + 1e-12)
        throw NumericalResidue("quadratic form has imaginary residue " +
                               std::to_string(s.imag()));
    return s.real();
}

struct OracleResult {
    std::vector<std::size_t> best_partition;
    double best_max_eigenvalue = std::numeric_limits<double>::infinity();
    std::uint64_t evaluated_count = 0;
    bool exhaustive = false;
};

namespace detail {

inline std::uint64_t binomial(std::size_t n, std::size_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > 16 * cap) return c;  // no need for the exact count past the cap
    }
    return c;
}

}  // namespace detail

/// Exhaustive balanced-partition search minimizing the larger of the two
/// sides' largest eigenvalues. Deterministic: first lexicographic minimizer.
inline OracleResult brute_force_balanced(const Frame& f, std::uint64_t cap = 2000000) {
    const std::size_t k = f.m / 2;
    const std::uint64_t total = detail::binomial(f.m, k, cap);
    if (total > cap)
        throw CapExceeded("C(" + std::to_string(f.m) + "," + std::to_string(k) +
                          ") exceeds cap " + std::to_string(cap));

    OracleResult res;
    std::vector<std::size_t> subset(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = i;
    std::vector<bool> in_subset(f.m);
    std::vector<std::size_t> complement;
    complement.reserve(f.m - k);

    while (true) {
        std::fill(in_subset.begin(), in_subset.end(), false);
        for (std::size_t i : subset) in_subset[i] = true;
        complement.clear();
        for (std::size_t i = 0; i < f.m; ++i)
            if (!in_subset[i]) complement.push_back(i);

        const double l1 = hermitian_eigenvalues(f.sum_outer(subset)).front();
        const double l2 = hermitian_eigenvalues(f.sum_outer(complement)).front();
        const double obj = std::max(l1, l2);
        ++res.evaluated_count;
        if (obj < res.best_max_eigenvalue) {
            res.best_max_eigenvalue = obj;
            res.best_partition = subset;
        }

        // next combination in lexicographic order
        std::size_t i = k;
        while (i-- > 0) {
            if (subset[i] != i + f.m - k) {
                ++subset[i];
                for (std::size_t j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
                break;
            }
            if (i == 0) {
                res.exhaustive = true;
                return res;
            }
        }
        if (k == 0) {
            res.exhaustive = true;
            return res;
        }
    }
}

struct ReplayOutcome {
    std::vector<bool> per_iteration;
    bool all_pass = true;
};

namespace detail {

inline double det_via_eigenvalues(const HermitianMatrix& a) {
    double p = 1.0;
    for (double l : hermitian_eigenvalues(a)) p *= l;
    return p;
}

template <typename ValueFn, typename BetterFn>
inline std::pair<bool, std::size_t> check_choice(const std::vector<std::size_t>& candidates,
                                                 std::size_t recorded, ValueFn&& value,
                                                 BetterFn&& better) {
    std::vector<double> vals(candidates.size());
    std::size_t recorded_pos = kNoIndex;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        vals[c] = value(candidates[c]);
        if (candidates[c] == recorded) recorded_pos = c;
    }
    if (recorded_pos == kNoIndex) return {false, candidates.empty() ? kNoIndex : candidates[0]};
    double opt = vals[0];
    for (double v : vals)
        if (better(v, opt)) opt = v;
    const double rel = 1e-9 * std::max(1.0, std::abs(opt));
    const double tie = 1e-12 * std::max(1.0, std::abs(opt));
    // the recorded value must attain the optimum within tolerance
    if (std::abs(vals[recorded_pos] - opt) > rel) {
        std::size_t expect = candidates[0];
        for (std::size_t c = 0; c < candidates.size(); ++c)
            if (std::abs(vals[c] - opt) <= tie) {
                expect = candidates[c];
                break;
            }
        return {false, expect};
    }
    // among exact ties the lowest index must have been taken
    if (std::abs(vals[recorded_pos] - opt) <= tie) {
        for (std::size_t c = 0; c < recorded_pos; ++c)
            if (std::abs(vals[c] - opt) <= tie) return {false, candidates[c]};
    }
    return {true, recorded};
}

}  // namespace detail

/// Replays a full trace against the literal selection rules: direct
/// determinant evaluation for the barrier algorithm, explicit-inverse
/// quadratic forms for the plain one.
inline ReplayOutcome verify_selection_trace(const Frame& f, const PartitionResult& result) {
    if (result.trace.empty() || result.config.record_trace != TraceLevel::Full)
        throw TraceMissing("selection replay needs a full trace");
    if (f.m > 512) throw CapExceeded("replay guard: m > 512");

    const bool barrier = result.config.algorithm == Algorithm::BarrierGreedy;
    ReplayOutcome out;
    out.per_iteration.reserve(result.trace.size());

    HermitianMatrix a = HermitianMatrix::zero(f.d);
    std::vector<std::size_t> candidates(f.m);
    for (std::size_t i = 0; i < f.m; ++i) candidates[i] = i;

    for (const auto& rec : result.trace) {
        if (rec.chosen == kNoIndex) throw TraceMissing("trace record lacks chosen index");
        bool pass;
        if (barrier) {
            const double u_next = rec.u;
            auto value = [&](std::size_t c) {
                return detail::det_via_eigenvalues(
                    a.shifted(u_next).subtract_outer(f.vectors[c]));
            };
            auto better = [](double x, double best) { return x > best; };
            std::tie(pass, std::ignore) =
                detail::check_choice(candidates, rec.chosen, value, better);
        } else {
            const auto inv = explicit_inverse(a.shifted(1.0));
            auto value = [&](std::size_t c) {
                return quadratic_form_explicit(inv, f.vectors[c]);
            };
            auto better = [](double x, double best) { return x < best; };
            std::tie(pass, std::ignore) =
                detail::check_choice(candidates, rec.chosen, value, better);
        }
        out.per_iteration.push_back(pass);
        out.all_pass = out.all_pass && pass;
        auto it = std::find(candidates.begin(), candidates.end(), rec.chosen);
        if (it == candidates.end())
            throw SelectionMismatch(rec.j, candidates.empty() ? kNoIndex : candidates[0],
                                    rec.chosen);
        candidates.erase(it);
        a = a.add_outer(f.vectors[rec.chosen]);
    }
    return out;
}

/// Throwing variant used for fault injection tests: raises at the first
/// failing iteration, naming the index the tie-break would have taken.
inline void verify_selection_trace_strict(const Frame& f, const PartitionResult& result) {
    if (result.trace.empty() || result.config.record_trace != TraceLevel::Full)
        throw TraceMissing("selection replay needs a full trace");
    if (f.m > 512) throw CapExceeded("replay guard: m > 512");

    const bool barrier = result.config.algorithm == Algorithm::BarrierGreedy;
    HermitianMatrix a = HermitianMatrix::zero(f.d);
    std::vector<std::size_t> candidates(f.m);
    for (std::size_t i = 0; i < f.m; ++i) candidates[i] = i;

    for (const auto& rec : result.trace) {
        if (rec.chosen == kNoIndex) throw TraceMissing("trace record lacks chosen index");
        bool pass;
        std::size_t expect;
        if (barrier) {
            auto value = [&](std::size_t c) {
                return detail::det_via_eigenvalues(
                    a.shifted(rec.u).subtract_outer(f.vectors[c]));
            };
            std::tie(pass, expect) = detail::check_choice(
                candidates, rec.chosen, value, [](double x, double b) { return x > b; });
        } else {
            const auto inv = explicit_inverse(a.shifted(1.0));
            auto value = [&](std::size_t c) {
                return quadratic_form_explicit(inv, f.vectors[c]);
            };
            std::tie(pass, expect) = detail::check_choice(
                candidates, rec.chosen, value, [](double x, double b) { return x < b; });
        }
        if (!pass) throw SelectionMismatch(rec.j, expect, rec.chosen);
        candidates.erase(std::find(candidates.begin(), candidates.end(), rec.chosen));
        a = a.add_outer(f.vectors[rec.chosen]);
    }
}

}  // namespace ks2

#endif
