// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jointwork/operators.hpp"

#include <functional>
#include <vector>

namespace jointwork {

/// Orthonormal Hermitian basis {G_0, …, G_{d²−1}} of d×d operators with
/// G_0 = 1/√d and Tr[G_μ G_ν] = δ_μν.
///
/// Ordering: the d(d−1)/2 symmetric off-diagonal generators (j<k), then the
/// d(d−1)/2 antisymmetric ones, then the d−1 traceless diagonal generators.
/// Indices 1 … d²−d therefore cover exactly the off-diagonal matrix units of
/// the frame, and d²−d+1 … d²−1 the diagonal ones.
class GellMannBasis {
public:
    /// Generators built on the columns of `frame` (a unitary); the identity
    /// frame gives the usual computational-basis matrices.
    explicit GellMannBasis(const ComplexMatrix& frame);

    Eigen::Index dim() const noexcept { return dim_; }
    Eigen::Index size() const noexcept { return dim_ * dim_; }
    const ComplexMatrix& generator(Eigen::Index mu) const { return generators_.at(static_cast<std::size_t>(mu)); }
    const std::vector<ComplexMatrix>& generators() const noexcept { return generators_; }
    const ComplexMatrix& frame() const noexcept { return frame_; }

    /// Number of off-diagonal generators, d² − d.
    Eigen::Index off_diagonal_count() const noexcept { return dim_ * dim_ - dim_; }

private:
    Eigen::Index dim_;
    ComplexMatrix frame_;
    std::vector<ComplexMatrix> generators_;
};

GellMannBasis build_basis(Eigen::Index dim);
GellMannBasis build_basis(const ComplexMatrix& frame);

struct BlochVector {
    Eigen::Index dim = 0;
    RealVector coefficients; // Γ_μ = Tr[G_μ X]
};

BlochVector to_bloch(const Hermitian& x, const GellMannBasis& basis);
Hermitian from_bloch(const BlochVector& v, const GellMannBasis& basis);

/// Complex-linear extension of the Bloch transform for non-Hermitian input.
Eigen::VectorXcd to_bloch_complex(const ComplexMatrix& x, const GellMannBasis& basis);
ComplexMatrix from_bloch_complex(const Eigen::VectorXcd& c, const GellMannBasis& basis);

using OperatorMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

struct BlochChannelMatrix {
    Eigen::Index dim = 0;
    Eigen::MatrixXd matrix; // Λ_μν = Tr[G_μ map(G_ν)]

    /// Applies the represented map to an arbitrary (possibly non-Hermitian)
    /// operator through its complex Bloch coefficients.
    ComplexMatrix apply(const ComplexMatrix& x, const GellMannBasis& basis) const;
};

/// Matrix of a linear, Hermiticity-preserving map in `basis`. Throws
/// NonlinearMap when additivity or homogeneity spot checks fail and
/// NotHermitian when an entry has an imaginary part above 1e−10.
BlochChannelMatrix channel_matrix(const OperatorMap& map, const GellMannBasis& basis);

/// Visibilities (λ, γ), both strictly inside (0, 1).
class VisibilityPair {
public:
    VisibilityPair(double lambda, double gamma);
    double lambda() const noexcept { return lambda_; }
    double gamma() const noexcept { return gamma_; }

private:
    double lambda_;
    double gamma_;
};

/// Off-diagonal contraction factor of the Lüders channel of the noisy energy
/// POVM with visibility λ:
///   κ = 2 √(λ + (1−λ)/d) √((1−λ)/d) + (d−2)(1−λ)/d.
double kappa(int dim, double lambda);

/// Largest γ for which the square-root joint observable stays positive for
/// every unitary: γ ≤ 2κ / (d + 2κ − dκ).
double gamma_bound(int dim, double lambda);

/// Fixed point λ = gamma_bound(d, λ), found by bisection.
double symmetric_critical_visibility(int dim);

enum class MubFormula {
    Corrected, ///< ½ (1 + 1/(√d + 1))
    Printed,   ///< ½ · 1/(√d + 1)
};

struct ReferenceVisibilities {
    double lambda_opt;
    double lambda_mub;
};

ReferenceVisibilities reference_visibilities(int dim, MubFormula mub = MubFormula::Corrected);

} // namespace jointwork
