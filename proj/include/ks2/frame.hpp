#ifndef KS2_FRAME_HPP
#define KS2_FRAME_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "ks2/errors.hpp"
#include "ks2/linalg.hpp"
#include "ks2/prng.hpp"

namespace ks2 {

/// m equal-norm vectors in C^d whose outer products sum to the identity.
struct Frame {
    std::size_t d = 0;
    std::size_t m = 0;
    double alpha = 0.0;  // common squared norm, d/m for a valid frame
    std::vector<CVector> vectors;

    HermitianMatrix sum_outer(const std::vector<std::size_t>& indices) const {
        HermitianMatrix a = HermitianMatrix::zero(d);
        for (std::size_t i : indices) {
            if (i >= m) throw IndexOutOfRange("vector index " + std::to_string(i));
            a = a.add_outer(vectors[i]);
        }
        return a;
    }
};

enum class GuaranteeRegime { Alg1Guaranteed, Alg2Guaranteed, NoGuarantee };

inline const char* to_string(GuaranteeRegime r) {
    switch (r) {
        case GuaranteeRegime::Alg1Guaranteed: return "Alg1Guaranteed";
        case GuaranteeRegime::Alg2Guaranteed: return "Alg2Guaranteed";
        default: return "NoGuarantee";
    }
}

inline GuaranteeRegime classify_regime(std::size_t d, std::size_t m) {
    if (m >= 221 * d * d) return GuaranteeRegime::Alg1Guaranteed;
    if (m >= 49 * d * d) return GuaranteeRegime::Alg2Guaranteed;
    return GuaranteeRegime::NoGuarantee;
}

struct ValidationReport {
    bool pass = false;
    double parseval_deviation = 0.0;   // ||sum v v* - I||_F
    double max_norm_deviation = 0.0;   // max_i | ||v_i||^2 - alpha |
    double trace_identity_gap = 0.0;   // | m*alpha - d |
    bool m_even = false;
    GuaranteeRegime regime = GuaranteeRegime::NoGuarantee;
    double tolerance = 1e-9;
};

inline ValidationReport validate_frame(const Frame& f, double tol = 1e-9) {
    ValidationReport rep;
    rep.tolerance = tol;
    rep.m_even = (f.m % 2 == 0);
    rep.regime = classify_regime(f.d, f.m);
    rep.trace_identity_gap = std::abs(static_cast<double>(f.m) * f.alpha -
                                      static_cast<double>(f.d));

    if (f.vectors.size() != f.m) {
        rep.pass = false;
        rep.parseval_deviation = std::numeric_limits<double>::infinity();
        return rep;
    }
    for (const auto& v : f.vectors) {
        if (v.size() != f.d) {
            rep.pass = false;
            rep.parseval_deviation = std::numeric_limits<double>::infinity();
            return rep;
        }
        rep.max_norm_deviation = std::max(rep.max_norm_deviation,
                                          std::abs(norm_squared(v) - f.alpha));
    }
    HermitianMatrix sum = HermitianMatrix::zero(f.d);
    for (const auto& v : f.vectors) sum = sum.add_outer(v);
    rep.parseval_deviation = sum.shifted(1.0).frobenius_norm();
    rep.pass = rep.parseval_deviation <= tol && rep.max_norm_deviation <= tol &&
               rep.trace_identity_gap <= tol;
    return rep;
}

/// d rows of the m-point DFT matrix scaled by 1/sqrt(m); exactly equal-norm
/// and Parseval when the selected rows are distinct.
inline Frame harmonic_frame(std::size_t d, std::size_t m,
                            const std::vector<std::size_t>& row_selection) {
    if (d < 1 || d > m) throw InvalidFrame("harmonic frame requires 1 <= d <= m");
    if (row_selection.size() != d)
        throw InvalidFrame("row selection must have exactly d entries");
    std::vector<std::size_t> sorted = row_selection;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidFrame("duplicate rows in selection");
    if (sorted.back() >= m) throw InvalidFrame("row index out of range");

    Frame f;
    f.d = d;
    f.m = m;
    f.alpha = static_cast<double>(d) / static_cast<double>(m);
    f.vectors.resize(m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        CVector v(d);
        for (std::size_t k = 0; k < d; ++k) {
            const double angle = 2.0 * std::numbers::pi *
                                 static_cast<double>((i * row_selection[k]) % m) /
                                 static_cast<double>(m);
            v[k] = scale * Complex{std::cos(angle), std::sin(angle)};
        }
        f.vectors[i] = std::move(v);
    }
    return f;
}

inline Frame harmonic_frame(std::size_t d, std::size_t m) {
    std::vector<std::size_t> rows(d);
    for (std::size_t k = 0; k < d; ++k) rows[k] = k;
    return harmonic_frame(d, m, rows);
}

/// Applies one seeded Haar-like random unitary (modified Gram-Schmidt QR of
/// a seeded complex Gaussian, R diagonal real positive) to every vector.
inline Frame rotate_frame(const Frame& f, std::uint64_t seed) {
    const std::size_t d = f.d;
    SplitMix64 rng(seed);
    std::vector<CVector> q(d, CVector(d));
    for (std::size_t col = 0; col < d; ++col) {
        for (std::size_t row = 0; row < d; ++row) {
            const auto [re, im] = rng.next_gaussian_pair();
            q[col][row] = Complex{re, im};
        }
    }
    for (std::size_t col = 0; col < d; ++col) {
        for (std::size_t prev = 0; prev < col; ++prev) {
            const Complex proj = inner(q[prev], q[col]);
            for (std::size_t row = 0; row < d; ++row) q[col][row] -= proj * q[prev][row];
        }
        const double nrm = std::sqrt(norm_squared(q[col]));
        if (!(nrm > 1e-12)) throw InvalidFrame("degenerate Gaussian draw in rotation");
        for (std::size_t row = 0; row < d; ++row) q[col][row] /= nrm;
    }
    Frame out = f;
    for (auto& v : out.vectors) {
        CVector w(d, Complex{0.0, 0.0});
        for (std::size_t col = 0; col < d; ++col)
            for (std::size_t row = 0; row < d; ++row) w[row] += q[col][row] * v[col];
        v = std::move(w);
    }
    return out;
}

/// Per-vector seeded unit phases; every v v* is unchanged.
inline Frame random_phase_frame(const Frame& f, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Frame out = f;
    for (auto& v : out.vectors) {
        const double theta = rng.next_angle();
        const Complex phase{std::cos(theta), std::sin(theta)};
        for (auto& z : v) z *= phase;
    }
    return out;
}

/// Block-diagonal composition; requires matching alpha.
inline Frame direct_sum(const Frame& f1, const Frame& f2) {
    if (std::abs(f1.alpha - f2.alpha) > 1e-12)
        throw AlphaMismatch("direct sum requires equal alpha: " + std::to_string(f1.alpha) +
                            " vs " + std::to_string(f2.alpha));
    Frame out;
    out.d = f1.d + f2.d;
    out.m = f1.m + f2.m;
    out.alpha = f1.alpha;
    out.vectors.reserve(out.m);
    for (const auto& v : f1.vectors) {
        CVector w(out.d, Complex{0.0, 0.0});
        std::copy(v.begin(), v.end(), w.begin());
        out.vectors.push_back(std::move(w));
    }
    for (const auto& v : f2.vectors) {
        CVector w(out.d, Complex{0.0, 0.0});
        std::copy(v.begin(), v.end(), w.begin() + static_cast<std::ptrdiff_t>(f1.d));
        out.vectors.push_back(std::move(w));
    }
    return out;
}

inline nlohmann::json frame_to_json(const Frame& f) {
    nlohmann::json j;
    j["d"] = f.d;
    j["m"] = f.m;
    j["alpha"] = f.alpha;
    nlohmann::json vecs = nlohmann::json::array();
    for (const auto& v : f.vectors) {
        nlohmann::json jv = nlohmann::json::array();
        for (const auto& z : v) jv.push_back({z.real(), z.imag()});
        vecs.push_back(std::move(jv));
    }
    j["vectors"] = std::move(vecs);
    return j;
}

inline std::string serialize_frame(const Frame& f) { return frame_to_json(f).dump(); }

/// Parses and re-validates; rejects header/content mismatches and frames
/// violating the Parseval or equal-norm invariants beyond tolerance.
inline Frame deserialize_frame(const std::string& text, double tol = 1e-9) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidFrame(std::string("malformed frame document: ") + e.what());
    }
    Frame f;
    try {
        f.d = j.at("d").get<std::size_t>();
        f.m = j.at("m").get<std::size_t>();
        f.alpha = j.at("alpha").get<double>();
        const auto& vecs = j.at("vectors");
        if (vecs.size() != f.m)
            throw InvalidFrame("header m=" + std::to_string(f.m) + " but document has " +
                               std::to_string(vecs.size()) + " vectors");
        f.vectors.reserve(f.m);
        for (const auto& jv : vecs) {
            if (jv.size() != f.d) throw InvalidFrame("vector length does not match d");
            CVector v(f.d);
            for (std::size_t k = 0; k < f.d; ++k)
                v[k] = Complex{jv[k][0].get<double>(), jv[k][1].get<double>()};
            f.vectors.push_back(std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidFrame(std::string("malformed frame document: ") + e.what());
    }
    const ValidationReport rep = validate_frame(f, tol);
    if (!rep.pass)
        throw InvalidFrame("frame fails validation: Parseval deviation " +
                           std::to_string(rep.parseval_deviation) + ", norm deviation " +
                           std::to_string(rep.max_norm_deviation) + ", m*alpha-d gap " +
                           std::to_string(rep.trace_identity_gap));
    return f;
}

/// FNV-1a 64 over the canonical serialized form.
inline std::string frame_fingerprint(const Frame& f) {
    const std::string s = serialize_frame(f);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace ks2

#endif
