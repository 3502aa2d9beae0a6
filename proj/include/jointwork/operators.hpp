// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace jointwork {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdClampTol = 1e-10;
inline constexpr double kDegeneracyGap = 1e-9;

/// Largest absolute entry of a complex matrix.
double max_abs(const ComplexMatrix& m);

/// A square complex matrix with ‖M − M†‖_max ≤ 1e−12.
///
/// The checked constructor throws NotHermitian. `projected` symmetrizes an
/// arithmetic result that is Hermitian up to rounding and skips the check.
class Hermitian {
public:
    explicit Hermitian(ComplexMatrix m);

    static Hermitian projected(const ComplexMatrix& m);
    static Hermitian identity(Eigen::Index dim);
    static Hermitian diagonal(const RealVector& diag);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }
    double trace() const { return m_.trace().real(); }

    Hermitian operator+(const Hermitian& o) const { return projected(m_ + o.m_); }
    Hermitian operator-(const Hermitian& o) const { return projected(m_ - o.m_); }
    Hermitian operator*(double s) const { return projected(m_ * s); }

private:
    struct Unchecked {};
    Hermitian(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}

    ComplexMatrix m_;
};

/// Non-degenerate spectral decomposition H = Σ_a E_a Π_a with E_1 < … < E_d.
class SpectralHamiltonian {
public:
    /// Builds from eigenvalues and a unitary whose columns are the matching
    /// eigenvectors. Pairs are sorted by energy; gaps ≤ 1e−9 throw
    /// DegenerateSpectrum.
    SpectralHamiltonian(const RealVector& energies, const ComplexMatrix& eigenvectors);

    /// Diagonal Hamiltonian in the computational basis.
    static SpectralHamiltonian diagonal(const RealVector& energies);

    Eigen::Index dim() const noexcept { return energies_.size(); }
    const RealVector& energies() const noexcept { return energies_; }
    /// Unitary whose column a spans the range of projector(a).
    const ComplexMatrix& frame() const noexcept { return frame_; }
    const ComplexMatrix& projector(std::size_t a) const { return projectors_.at(a); }
    const std::vector<ComplexMatrix>& projectors() const noexcept { return projectors_; }
    Hermitian matrix() const;
    double mean_energy() const { return energies_.mean(); }

private:
    RealVector energies_;
    ComplexMatrix frame_;
    std::vector<ComplexMatrix> projectors_;
};

SpectralHamiltonian spectral_decompose(const Hermitian& h);

/// PSD square root. Eigenvalues in [−1e−10, 0) are clamped to zero; anything
/// more negative throws NotPsd.
Hermitian matrix_sqrt_psd(const Hermitian& p);

double min_eigenvalue(const Hermitian& h);
RealVector eigenvalues(const Hermitian& h);

/// Haar-distributed unitary: complex Ginibre draw, Householder QR, and the
/// phase fix that makes diag(R) positive. Deterministic in `seed`.
ComplexMatrix haar_random_unitary(Eigen::Index dim, std::uint64_t seed);

/// ‖U†U − 1‖_max.
double unitarity_defect(const ComplexMatrix& u);

/// Hilbert-Schmidt inner product Tr[A B] for Hermitian-valued operands.
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace jointwork
