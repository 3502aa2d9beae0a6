// SPDX-License-Identifier: Apache-2.0
// Independent reference computations used by the tests. Nothing here calls
// into the library's linear algebra beyond plain Eigen arithmetic.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

/// Closed-form eigenpairs of a 2×2 Hermitian matrix, ascending.
struct Eig2 {
    double lo, hi;
    Mat p_lo, p_hi; // spectral projectors
};

inline Eig2 eig2(const Mat& h) {
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const cd b = h(0, 1);
    const double mid = 0.5 * (a + d);
    const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    Eig2 e{mid - r, mid + r, Mat(2, 2), Mat(2, 2)};
    const Mat id = Mat::Identity(2, 2);
    // P_± = (H − λ_∓)/(λ_± − λ_∓)
    e.p_hi = (h - e.lo * id) / (2.0 * r);
    e.p_lo = (e.hi * id - h) / (2.0 * r);
    return e;
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Mat projector(const Mat& frame, Eigen::Index k) { return frame.col(k) * frame.col(k).adjoint(); }

/// Noisy effect λΠ_a + (1−λ)/d·1 and its square root, both built from the
/// projectors directly.
inline Mat noisy_effect(const Mat& frame, Eigen::Index a, double v) {
    const Eigen::Index d = frame.rows();
    return v * projector(frame, a) + (1.0 - v) / static_cast<double>(d) * Mat::Identity(d, d);
}

inline Mat noisy_effect_sqrt(const Mat& frame, Eigen::Index a, double v) {
    const Eigen::Index d = frame.rows();
    Mat r = Mat::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        r += std::sqrt((k == a ? v : 0.0) + (1.0 - v) / static_cast<double>(d)) * projector(frame, k);
    }
    return r;
}

/// Step-by-step simulation of measure / evolve / measure: returns p(a,b).
inline Eigen::MatrixXd sequential(const Mat& rho, const Mat& frame_a, double lambda, const Mat& u, const Mat& frame_b,
                                  double gamma) {
    const Eigen::Index d = rho.rows();
    Eigen::MatrixXd p(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        const Mat k = noisy_effect_sqrt(frame_a, a, lambda);
        const Mat post = u * (k * rho * k.adjoint()) * u.adjoint();
        for (Eigen::Index b = 0; b < d; ++b) p(a, b) = (noisy_effect(frame_b, b, gamma) * post).trace().real();
    }
    return p;
}

/// Haar unitary by modified Gram-Schmidt on a Ginibre matrix. Distributed
/// identically to the QR construction but computed differently.
inline Mat haar_gram_schmidt(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat z(d, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double re = n(rng);
        z(i) = cd(re, n(rng));
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) z.col(j) -= z.col(i).dot(z.col(j)) * z.col(i);
        z.col(j) /= z.col(j).norm();
    }
    return z;
}

inline Mat random_density(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat z(d, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double re = n(rng);
        z(i) = cd(re, n(rng));
    }
    Mat rho = z * z.adjoint();
    return rho / rho.trace();
}

inline Mat random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat z(d, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double re = n(rng);
        z(i) = cd(re, n(rng));
    }
    return 0.5 * (z + z.adjoint());
}

inline Vec random_probabilities(Eigen::Index d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Vec p(d);
    for (Eigen::Index i = 0; i < d; ++i) p(i) = u(rng);
    return p / p.sum();
}

inline Vec ladder(Eigen::Index d, double step) {
    Vec e(d);
    for (Eigen::Index i = 0; i < d; ++i) e(i) = step * static_cast<double>(i);
    return e;
}

/// Plain-arithmetic gamma bound: 2κ/(d + 2κ − dκ).
inline double gamma_bound(int d, double l) {
    const double dd = d;
    const double k = 2.0 * std::sqrt(l + (1.0 - l) / dd) * std::sqrt((1.0 - l) / dd) + (dd - 2.0) * (1.0 - l) / dd;
    return 2.0 * k / (dd + 2.0 * k - dd * k);
}

/// Symmetric critical visibility: bracket on a 1e−4 grid, then bisect
/// gamma_bound(d, l) − l to machine precision.
inline double symmetric_visibility(int d) {
    double lo = 0.0, hi = 1.0;
    for (int i = 1; i < 10000; ++i) {
        const double l = i * 1e-4;
        if (gamma_bound(d, l) < l) {
            lo = l - 1e-4;
            hi = l;
            break;
        }
    }
    while (hi - lo > 1e-16 && std::nextafter(lo, hi) < hi) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        (gamma_bound(d, m) >= m ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

} // namespace oracle
