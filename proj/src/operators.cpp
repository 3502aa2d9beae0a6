// SPDX-License-Identifier: Apache-2.0
#include "jointwork/operators.hpp"

#include "jointwork/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace jointwork {

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Hermitian::Hermitian(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
        throw DimMismatch("operator must be a non-empty square matrix, got " + std::to_string(m_.rows()) +
                          "x" + std::to_string(m_.cols()));
    }
    if (!m_.allFinite()) throw InvalidArgument("operator has non-finite entries");
    const double defect = max_abs(m_ - m_.adjoint());
    if (defect > kHermitianTol) {
        throw NotHermitian("max |M - M^dag| = " + std::to_string(defect));
    }
}

Hermitian Hermitian::projected(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimMismatch("operator must be square");
    return Hermitian(ComplexMatrix(0.5 * (m + m.adjoint())), Unchecked{});
}

Hermitian Hermitian::identity(Eigen::Index dim) {
    return Hermitian(ComplexMatrix::Identity(dim, dim), Unchecked{});
}

Hermitian Hermitian::diagonal(const RealVector& diag) {
    return Hermitian(ComplexMatrix(diag.cast<Complex>().asDiagonal()), Unchecked{});
}

SpectralHamiltonian::SpectralHamiltonian(const RealVector& energies, const ComplexMatrix& eigenvectors) {
    const Eigen::Index d = energies.size();
    if (d == 0) throw DimMismatch("empty spectrum");
    if (eigenvectors.rows() != d || eigenvectors.cols() != d) {
        throw DimMismatch("eigenvector matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    }
    if (!energies.allFinite()) throw InvalidArgument("non-finite energy");
    if (unitarity_defect(eigenvectors) > 1e-10) throw NotUnitary("eigenvector columns are not orthonormal");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return energies(i) < energies(j); });

    energies_.resize(d);
    frame_.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        energies_(k) = energies(order[static_cast<std::size_t>(k)]);
        frame_.col(k) = eigenvectors.col(order[static_cast<std::size_t>(k)]);
    }
    for (Eigen::Index k = 1; k < d; ++k) {
        if (energies_(k) - energies_(k - 1) <= kDegeneracyGap) {
            throw DegenerateSpectrum("eigenvalues " + std::to_string(energies_(k - 1)) + " and " +
                                     std::to_string(energies_(k)) + " are closer than 1e-9");
        }
    }
    projectors_.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        projectors_.emplace_back(frame_.col(k) * frame_.col(k).adjoint());
    }
}

SpectralHamiltonian SpectralHamiltonian::diagonal(const RealVector& energies) {
    return SpectralHamiltonian(energies, ComplexMatrix::Identity(energies.size(), energies.size()));
}

Hermitian SpectralHamiltonian::matrix() const {
    return Hermitian::projected(frame_ * energies_.cast<Complex>().asDiagonal() * frame_.adjoint());
}

SpectralHamiltonian spectral_decompose(const Hermitian& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
    if (es.info() != Eigen::Success) throw Error("eigensolver failed");
    return SpectralHamiltonian(es.eigenvalues(), es.eigenvectors());
}

Hermitian matrix_sqrt_psd(const Hermitian& p) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p.matrix());
    if (es.info() != Eigen::Success) throw Error("eigensolver failed");
    RealVector ev = es.eigenvalues();
    if (ev(0) < -kPsdClampTol) throw NotPsd("min eigenvalue " + std::to_string(ev(0)));
    ev = ev.cwiseMax(0.0).cwiseSqrt();
    const auto& v = es.eigenvectors();
    return Hermitian::projected(v * ev.cast<Complex>().asDiagonal() * v.adjoint());
}

RealVector eigenvalues(const Hermitian& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("eigensolver failed");
    return es.eigenvalues();
}

double min_eigenvalue(const Hermitian& h) { return eigenvalues(h)(0); }

ComplexMatrix haar_random_unitary(Eigen::Index dim, std::uint64_t seed) {
    if (dim < 1) throw InvalidArgument("dimension must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix z(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(i, j) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const Complex rkk = r(k, k);
        const double mag = std::abs(rkk);
        q.col(k) *= mag > 0.0 ? rkk / mag : Complex(1.0);
    }
    return q;
}

double unitarity_defect(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.transpose().cwiseProduct(b).sum().real();
}

} // namespace jointwork
