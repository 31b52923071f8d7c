#ifndef KS2_DIAGNOSTICS_HPP
#define KS2_DIAGNOSTICS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ks2/errors.hpp"
#include "ks2/frame.hpp"
#include "ks2/linalg.hpp"
#include "ks2/solver.hpp"

namespace ks2 {

enum class GuaranteeVerdict { Pass34, Fail, NotApplicable };

inline const char* to_string(GuaranteeVerdict v) {
    switch (v) {
        case GuaranteeVerdict::Pass34: return "Pass34";
        case GuaranteeVerdict::Fail: return "Fail";
        default: return "NotApplicable";
    }
}

struct ConditionBound {
    double x = 0.0;
    double kappa_upper = 1.0;
};

/// kappa(A) <= (1+x)/(1-x) with x = sqrt(1 - (d/tr A)^d det A), evaluated
/// in log-space. Tiny negative radicands (>= -1e-12) are clamped to zero.
inline ConditionBound condition_bound(const HermitianMatrix& a) {
    const double d = static_cast<double>(a.dim());
    const double tr = a.trace();
    const double ld = log_det(a);  // throws NotPositiveDefinite
    const double radicand = 1.0 - std::exp(d * std::log(d / tr) + ld);
    if (radicand < -1e-12)
        throw DegenerateBound("radicand " + std::to_string(radicand) + " below tolerance");
    ConditionBound b;
    b.x = std::sqrt(std::min(1.0, std::max(0.0, radicand)));
    b.kappa_upper = b.x < 1.0 ? (1.0 + b.x) / (1.0 - b.x)
                              : std::numeric_limits<double>::infinity();
    return b;
}

struct SpectralReport {
    double lambda_min_A = 0.0;
    double lambda_max_A = 0.0;
    double lambda_min_IA = 0.0;
    double lambda_max_IA = 0.0;
    double theta = 0.0;  // 1 - worst side largest eigenvalue
    double kappa_IA = std::numeric_limits<double>::infinity();
    double x_bound = 1.0;
    double kappa_upper = std::numeric_limits<double>::infinity();
    double logdet_IA = -std::numeric_limits<double>::infinity();
    double logdet_floor = 0.0;  // -d log 2 - 2 d^2 / m
    GuaranteeVerdict guarantee = GuaranteeVerdict::NotApplicable;
};

inline bool regime_covers(GuaranteeRegime regime, Algorithm alg) {
    if (regime == GuaranteeRegime::Alg1Guaranteed) return true;
    if (regime == GuaranteeRegime::Alg2Guaranteed) return alg == Algorithm::PlainGreedy;
    return false;
}

inline SpectralReport spectral_report(const Frame& f, const PartitionResult& result) {
    const HermitianMatrix a = f.sum_outer(result.s1);
    const HermitianMatrix b = f.sum_outer(result.s2);
    const auto lam_a = hermitian_eigenvalues(a);
    const auto lam_b = hermitian_eigenvalues(b);

    // Parseval pairs the two spectra as lambda and 1 - lambda.
    for (std::size_t i = 0; i < lam_a.size(); ++i) {
        const double expected = 1.0 - lam_a[lam_a.size() - 1 - i];
        if (std::abs(lam_b[i] - expected) > 1e-6)
            throw InvalidFrame("side-2 spectrum violates the Parseval identity; "
                               "instance is not a valid frame");
    }

    SpectralReport rep;
    rep.lambda_max_A = lam_a.front();
    rep.lambda_min_A = lam_a.back();
    rep.lambda_max_IA = lam_b.front();
    rep.lambda_min_IA = lam_b.back();
    rep.theta = 1.0 - std::max(rep.lambda_max_A, rep.lambda_max_IA);
    rep.logdet_floor = -static_cast<double>(f.d) * std::log(2.0) -
                       2.0 * static_cast<double>(f.d * f.d) / static_cast<double>(f.m);

    const HermitianMatrix ia = a.shifted(1.0);
    try {
        const ConditionBound cb = condition_bound(ia);
        rep.x_bound = cb.x;
        rep.kappa_upper = cb.kappa_upper;
        rep.logdet_IA = log_det(ia);
        rep.kappa_IA = condition_number(ia);
    } catch (const NotPositiveDefinite&) {
        // I - A singular or indefinite; report keeps the -inf/1 sentinels
    }

    // A completed off-regime run that misses the 3/4 bound broke no promise:
    // it is NotApplicable, not Fail.
    const bool within = std::max(rep.lambda_max_A, rep.lambda_max_IA) <= 0.75 + 1e-9;
    if (within) {
        rep.guarantee = GuaranteeVerdict::Pass34;
    } else if (regime_covers(classify_regime(f.d, f.m), result.config.algorithm)) {
        rep.guarantee = GuaranteeVerdict::Fail;
    } else {
        rep.guarantee = GuaranteeVerdict::NotApplicable;
    }
    return rep;
}

struct MarginEntry {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    double slack = 0.0;  // positive means the inequality holds with room
    bool applicable = true;
};

struct MarginSummary {
    std::vector<MarginEntry> entries;

    const MarginEntry* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    }
};

/// Slack in each inequality chain of the analysis; entries are marked
/// not-applicable outside the regime that justifies them.
inline MarginSummary guarantee_margin(const SpectralReport& rep, GuaranteeRegime regime) {
    const bool applicable = regime != GuaranteeRegime::NoGuarantee;
    MarginSummary s;
    auto upper = [&](const std::string& name, double value, double threshold) {
        s.entries.push_back({name, value, threshold, threshold - value, applicable});
    };
    auto lower = [&](const std::string& name, double value, double threshold) {
        s.entries.push_back({name, value, threshold, value - threshold, applicable});
    };
    upper("x_vs_1_5", rep.x_bound, 0.2);
    upper("kappa_IA_vs_3_2", rep.kappa_IA, 1.5);
    upper("lambda_max_A_vs_3_4", rep.lambda_max_A, 0.75);
    upper("lambda_max_A_vs_2_3", rep.lambda_max_A, 2.0 / 3.0);
    lower("lambda_min_A_vs_1_4", rep.lambda_min_A, 0.25);
    lower("lambda_min_A_vs_1_3", rep.lambda_min_A, 1.0 / 3.0);
    lower("logdet_IA_vs_floor", rep.logdet_IA, rep.logdet_floor);
    return s;
}

}  // namespace ks2

#endif
