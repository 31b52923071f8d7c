#ifndef KS2_LINALG_HPP
#define KS2_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "ks2/errors.hpp"

namespace ks2 {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline double norm_squared(const CVector& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

inline Complex inner(const CVector& a, const CVector& b) {
    // <a, b> = sum conj(a_i) b_i
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// Dense d x d complex Hermitian matrix, row-major.
/// Construction symmetrizes exactly: entries(i,j) = conj(entries(j,i)),
/// real diagonal. Raw input deviating beyond 1e-12 is rejected.
class HermitianMatrix {
public:
    explicit HermitianMatrix(std::size_t d) : d_(d), a_(d * d, Complex{0.0, 0.0}) {}

    static HermitianMatrix zero(std::size_t d) { return HermitianMatrix(d); }

    static HermitianMatrix identity(std::size_t d) {
        HermitianMatrix m(d);
        for (std::size_t i = 0; i < d; ++i) m.a_[i * d + i] = 1.0;
        return m;
    }

    static HermitianMatrix diagonal(const std::vector<double>& diag) {
        HermitianMatrix m(diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m.a_[i * m.d_ + i] = diag[i];
        return m;
    }

    /// Builds from raw row-major entries, checking Hermitian symmetry
    /// within `tol` and then symmetrizing exactly.
    static HermitianMatrix from_entries(std::size_t d, const std::vector<Complex>& raw,
                                        double tol = 1e-12) {
        if (raw.size() != d * d) throw DimensionMismatch("entry count does not match d*d");
        double scale = 0.0;
        for (const auto& z : raw) scale = std::max(scale, std::abs(z));
        HermitianMatrix m(d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i; j < d; ++j) {
                const Complex upper = raw[i * d + j];
                const Complex lower = raw[j * d + i];
                if (std::abs(upper - std::conj(lower)) > tol * std::max(1.0, scale))
                    throw DimensionMismatch("matrix is not Hermitian within tolerance");
                Complex v = 0.5 * (upper + std::conj(lower));
                if (i == j) v = Complex{v.real(), 0.0};
                m.a_[i * d + j] = v;
                m.a_[j * d + i] = std::conj(v);
            }
        }
        return m;
    }

    std::size_t dim() const { return d_; }

    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * d_ + j]; }

    double diag(std::size_t i) const { return a_[i * d_ + i].real(); }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < d_; ++i) t += diag(i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : a_) s += std::norm(z);
        return std::sqrt(s);
    }

    /// A + v v*, diagonal imaginary parts forced to zero.
    HermitianMatrix add_outer(const CVector& v) const {
        if (v.size() != d_) throw DimensionMismatch("vector length does not match matrix dim");
        HermitianMatrix r(*this);
        for (std::size_t i = 0; i < d_; ++i) {
            r.a_[i * d_ + i] = Complex{r.a_[i * d_ + i].real() + std::norm(v[i]), 0.0};
            for (std::size_t j = i + 1; j < d_; ++j) {
                const Complex t = v[i] * std::conj(v[j]);
                r.a_[i * d_ + j] += t;
                r.a_[j * d_ + i] = std::conj(r.a_[i * d_ + j]);
            }
        }
        return r;
    }

    /// u*I - A
    HermitianMatrix shifted(double u) const {
        HermitianMatrix r(d_);
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t j = 0; j < d_; ++j)
                r.a_[i * d_ + j] = (i == j ? Complex{u, 0.0} : Complex{0.0, 0.0}) - a_[i * d_ + j];
        return r;
    }

    HermitianMatrix subtract_outer(const CVector& v) const {
        if (v.size() != d_) throw DimensionMismatch("vector length does not match matrix dim");
        HermitianMatrix r(*this);
        for (std::size_t i = 0; i < d_; ++i) {
            r.a_[i * d_ + i] = Complex{r.a_[i * d_ + i].real() - std::norm(v[i]), 0.0};
            for (std::size_t j = i + 1; j < d_; ++j) {
                const Complex t = v[i] * std::conj(v[j]);
                r.a_[i * d_ + j] -= t;
                r.a_[j * d_ + i] = std::conj(r.a_[i * d_ + j]);
            }
        }
        return r;
    }

    CVector apply(const CVector& v) const {
        if (v.size() != d_) throw DimensionMismatch("vector length does not match matrix dim");
        CVector out(d_, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t j = 0; j < d_; ++j) out[i] += a_[i * d_ + j] * v[j];
        return out;
    }

private:
    std::size_t d_;
    std::vector<Complex> a_;
};

inline HermitianMatrix outer_product_accumulate(const HermitianMatrix& a, const CVector& v) {
    return a.add_outer(v);
}

inline HermitianMatrix shifted(const HermitianMatrix& a, double u) { return a.shifted(u); }

/// Lower-triangular Cholesky factor L with L L* = A.
class CholeskyFactor {
public:
    std::size_t dim() const { return d_; }

    const Complex& operator()(std::size_t i, std::size_t j) const { return l_[i * d_ + j]; }

    double log_det() const {
        double s = 0.0;
        for (std::size_t i = 0; i < d_; ++i) s += std::log(l_[i * d_ + i].real());
        return 2.0 * s;
    }

    /// Solves L y = b in place.
    CVector forward_solve(const CVector& b) const {
        CVector y(b);
        for (std::size_t i = 0; i < d_; ++i) {
            for (std::size_t j = 0; j < i; ++j) y[i] -= l_[i * d_ + j] * y[j];
            y[i] /= l_[i * d_ + i];
        }
        return y;
    }

    /// Solves L* x = y.
    CVector backward_solve(const CVector& y) const {
        CVector x(y);
        for (std::size_t ii = d_; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < d_; ++j) x[ii] -= std::conj(l_[j * d_ + ii]) * x[j];
            x[ii] /= l_[ii * d_ + ii];
        }
        return x;
    }

    static std::optional<CholeskyFactor> factor(const HermitianMatrix& a) {
        const std::size_t d = a.dim();
        double max_diag = 0.0;
        for (std::size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, std::abs(a.diag(i)));
        const double pivot_tol = 1e-14 * max_diag;

        CholeskyFactor f;
        f.d_ = d;
        f.l_.assign(d * d, Complex{0.0, 0.0});
        auto& l = f.l_;
        for (std::size_t j = 0; j < d; ++j) {
            double pivot = a.diag(j);
            for (std::size_t k = 0; k < j; ++k) pivot -= std::norm(l[j * d + k]);
            if (!(pivot > pivot_tol)) return std::nullopt;
            const double ljj = std::sqrt(pivot);
            l[j * d + j] = ljj;
            for (std::size_t i = j + 1; i < d; ++i) {
                Complex s = a(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * std::conj(l[j * d + k]);
                l[i * d + j] = s / ljj;
            }
        }
        return f;
    }

private:
    std::size_t d_ = 0;
    std::vector<Complex> l_;
};

inline std::optional<CholeskyFactor> cholesky(const HermitianMatrix& a) {
    return CholeskyFactor::factor(a);
}

inline double log_det(const HermitianMatrix& a) {
    auto f = CholeskyFactor::factor(a);
    if (!f) throw NotPositiveDefinite();
    return f->log_det();
}

/// v* A^{-1} v = ||L^{-1} v||^2, exactly real and nonnegative.
inline double quadratic_form_inverse(const CholeskyFactor& f, const CVector& v) {
    if (v.size() != f.dim()) throw DimensionMismatch("vector length does not match matrix dim");
    const CVector y = f.forward_solve(v);
    return norm_squared(y);
}

inline double quadratic_form_inverse(const HermitianMatrix& a, const CVector& v) {
    auto f = CholeskyFactor::factor(a);
    if (!f) throw NotPositiveDefinite();
    return quadratic_form_inverse(*f, v);
}

/// Eigendecomposition by cyclic Jacobi with complex rotations.
struct EigenResult {
    std::vector<double> values;  // descending
    // column k of `vectors` is the eigenvector for values[k]; empty unless requested
    std::vector<Complex> vectors;
    std::size_t dim = 0;
};

inline EigenResult hermitian_eigen(const HermitianMatrix& a, bool want_vectors = false) {
    const std::size_t d = a.dim();
    std::vector<Complex> w(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) w[i * d + j] = a(i, j);

    std::vector<Complex> v;
    if (want_vectors) {
        v.assign(d * d, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
    }

    const double scale = std::max(1.0, a.frobenius_norm());
    const double tol = 1e-12 * scale;
    const int max_sweeps = 100;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) s += 2.0 * std::norm(w[i * d + j]);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (d > 1 && off_norm() > tol) {
        if (++sweep > max_sweeps) throw NonConvergence("Jacobi sweeps exceeded cap");
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const Complex apq = w[p * d + q];
                const double r = std::abs(apq);
                if (r <= 1e-300) continue;
                const Complex phase = apq / r;  // a_pq = r * phase
                const double app = w[p * d + p].real();
                const double aqq = w[q * d + q].real();
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // G differs from I only at (p,p)=c, (p,q)=s*phase,
                // (q,p)=-s*conj(phase), (q,q)=c; apply A <- G* A G.
                for (std::size_t k = 0; k < d; ++k) {
                    if (k == p || k == q) continue;
                    const Complex akp = w[k * d + p];
                    const Complex akq = w[k * d + q];
                    w[k * d + p] = c * akp - s * std::conj(phase) * akq;
                    w[k * d + q] = s * phase * akp + c * akq;
                    w[p * d + k] = std::conj(w[k * d + p]);
                    w[q * d + k] = std::conj(w[k * d + q]);
                }
                w[p * d + p] = app - t * r;
                w[q * d + q] = aqq + t * r;
                w[p * d + q] = 0.0;
                w[q * d + p] = 0.0;
                if (want_vectors) {
                    for (std::size_t k = 0; k < d; ++k) {
                        const Complex vkp = v[k * d + p];
                        const Complex vkq = v[k * d + q];
                        v[k * d + p] = c * vkp - s * std::conj(phase) * vkq;
                        v[k * d + q] = s * phase * vkp + c * vkq;
                    }
                }
            }
        }
    }

    EigenResult res;
    res.dim = d;
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::vector<double> diag(d);
    for (std::size_t i = 0; i < d; ++i) diag[i] = w[i * d + i].real();
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });
    res.values.resize(d);
    for (std::size_t i = 0; i < d; ++i) res.values[i] = diag[order[i]];
    if (want_vectors) {
        res.vectors.assign(d * d, Complex{0.0, 0.0});
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t i = 0; i < d; ++i) res.vectors[i * d + k] = v[i * d + order[k]];
    }
    return res;
}

inline std::vector<double> hermitian_eigenvalues(const HermitianMatrix& a) {
    return hermitian_eigen(a).values;
}

inline double condition_number(const HermitianMatrix& a) {
    const auto lam = hermitian_eigenvalues(a);
    if (lam.empty()) throw DimensionMismatch("empty matrix");
    if (!(lam.back() > 0.0)) throw NotPositiveDefinite("lambda_min <= 0");
    return lam.front() / lam.back();
}

}  // namespace ks2

#endif
