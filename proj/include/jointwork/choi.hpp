// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jointwork/bloch.hpp"

#include <cstdint>

namespace jointwork {

/// Positivity of Ξ = I_A⁻¹ ∘ Ψ_γ, the map that turns Heisenberg-picture
/// projectors into the auxiliary effects of the square-root joint observable.
///
/// D is the Choi matrix of Ξ scaled by d (Σ_ij |i⟩⟨j| ⊗ Ξ(|i⟩⟨j|) times d),
/// so that the product-state minimum equals 1 − γ + dγ/2 − dγ/(2κ).

/// Closed-form product-state minimum 1 − γ + dγ/2 − dγ/(2κ).
double choi_margin_closed_form(int dim, double lambda, double gamma);

/// Scaled Choi matrix of Ξ assembled from the numerically computed Bloch
/// channel matrices of the Lüders channel and the depolarizer (Ξ = Λ⁻¹Υ).
ComplexMatrix scaled_choi_matrix(int dim, double lambda, double gamma);

struct ProductStateMinimum {
    double value;
    Eigen::VectorXcd first;
    Eigen::VectorXcd second;
};

/// Minimizes ⟨ψ_a ⊗ ψ_b| D |ψ_a ⊗ ψ_b⟩ over unit vectors by alternating
/// eigen-minimization, seeded with the two-level certificate
/// a = (1, 1)/√2, b = (1, −1)/√2 and `restarts` random starts.
ProductStateMinimum minimize_product_expectation(const ComplexMatrix& d_matrix, int dim, int restarts,
                                                 std::uint64_t seed);

struct ChoiMargin {
    double closed_form;
    double numerical;
};

/// Both routes to the positivity margin. Throws NonInvertibleInstrument for
/// λ ≥ 1 − 1e−9.
ChoiMargin choi_margins(int dim, double lambda, double gamma, int restarts = 16, std::uint64_t seed = 0x5eed);

/// Positivity margin of Ξ. Computes both routes and throws Error when they
/// disagree by more than 1e−8; returns the closed form.
double choi_positivity_margin(int dim, const VisibilityPair& pair);
double choi_positivity_margin(int dim, double lambda, double gamma);

} // namespace jointwork
