// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jointwork/bloch.hpp"
#include "jointwork/operators.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace jointwork {

inline constexpr double kPovmTol = 1e-10;

/// Finite POVM: PSD effects (min eigenvalue ≥ −1e−10) summing to the
/// identity within 1e−10. Throws InvalidPovm otherwise.
class Povm {
public:
    explicit Povm(std::vector<Hermitian> effects);

    std::size_t size() const noexcept { return effects_.size(); }
    Eigen::Index dim() const noexcept { return effects_.front().dim(); }
    const Hermitian& effect(std::size_t a) const;
    const std::vector<Hermitian>& effects() const noexcept { return effects_; }

    /// The uninformative POVM with `outcomes` effects equal to 1/outcomes.
    static Povm trivial(Eigen::Index dim, std::size_t outcomes);

private:
    std::vector<Hermitian> effects_;
};

/// A_a = λ Π_a + (1 − λ)/d · 1 built from the spectral projectors of H.
class NoisyEnergyPovm {
public:
    NoisyEnergyPovm(SpectralHamiltonian hamiltonian, double visibility);

    const SpectralHamiltonian& hamiltonian() const noexcept { return hamiltonian_; }
    double visibility() const noexcept { return visibility_; }
    const Povm& povm() const noexcept { return povm_; }

private:
    SpectralHamiltonian hamiltonian_;
    double visibility_;
    Povm povm_;
};

NoisyEnergyPovm noisy_effects(const SpectralHamiltonian& h, double visibility);

/// Lüders instrument ρ ↦ A_a^{1/2} ρ A_a^{1/2} with cached square roots.
///
/// Instruments built from a NoisyEnergyPovm remember the energy frame and the
/// visibility, which is what makes the inverse channel available.
class LuedersInstrument {
public:
    explicit LuedersInstrument(Povm povm);
    explicit LuedersInstrument(const NoisyEnergyPovm& noisy);

    const Povm& povm() const noexcept { return povm_; }
    std::size_t size() const noexcept { return povm_.size(); }
    Eigen::Index dim() const noexcept { return povm_.dim(); }
    const Hermitian& sqrt_effect(std::size_t a) const;

    /// Energy frame and visibility, present for noisy energy instruments.
    const std::optional<SpectralHamiltonian>& hamiltonian() const noexcept { return hamiltonian_; }
    std::optional<double> visibility() const noexcept { return visibility_; }

    /// Gell-Mann basis aligned with the energy frame (noisy instruments only).
    const GellMannBasis& aligned_basis() const;

private:
    Povm povm_;
    std::vector<Hermitian> sqrt_effects_;
    std::optional<SpectralHamiltonian> hamiltonian_;
    std::optional<double> visibility_;
    std::shared_ptr<const GellMannBasis> basis_;
};

/// Checks that ρ is a density operator (PSD within 1e−10, unit trace within
/// 1e−10). Throws NotPsd / InvalidArgument.
void require_density_operator(const Hermitian& rho);

/// A_a^{1/2} ρ A_a^{1/2}. Throws IndexOutOfRange for a ≥ |A|.
Hermitian luders_apply(const LuedersInstrument& instrument, std::size_t a, const Hermitian& rho);

/// Σ_a A_a^{1/2} X A_a^{1/2}.
Hermitian instrument_channel(const LuedersInstrument& instrument, const Hermitian& x);
ComplexMatrix instrument_channel(const LuedersInstrument& instrument, const ComplexMatrix& x);

/// Inverse of instrument_channel, exact in the frame-aligned Bloch picture:
/// the coefficients of the d² − d off-diagonal generators are divided by κ.
/// Throws NonInvertibleInstrument for visibility ≥ 1 − 1e−9 or for
/// instruments without noisy-energy structure.
Hermitian inverse_instrument_channel(const LuedersInstrument& instrument, const Hermitian& x);

/// Ψ_γ(X) = γ X + (1 − γ) Tr[X]/d · 1. Equals γX + (1 − γ)/d · 1 on unit-trace
/// input and stays linear on everything else.
Hermitian depolarize(const Hermitian& x, double gamma);

/// B^U_b = U† B_b U. Throws NotUnitary when ‖U†U − 1‖_max > 1e−10.
Povm heisenberg_povm(const Povm& b, const ComplexMatrix& u);

/// Rectangular grid of operators W_ab, row-major in (a, b).
class EffectGrid {
public:
    EffectGrid(std::size_t rows, std::size_t cols, Eigen::Index dim);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Eigen::Index dim() const noexcept { return dim_; }
    ComplexMatrix& operator()(std::size_t a, std::size_t b) { return cells_[a * cols_ + b]; }
    const ComplexMatrix& operator()(std::size_t a, std::size_t b) const { return cells_[a * cols_ + b]; }

    /// Minimum eigenvalue over all cells (Hermitian part).
    double min_eigenvalue() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    Eigen::Index dim_;
    std::vector<ComplexMatrix> cells_;
};

/// max over a, b of ‖Σ_b W_ab − A_a‖_max and ‖Σ_a W_ab − B_b‖_max.
/// Throws ShapeMismatch when the grid is not |A| × |B|.
double check_marginals(const EffectGrid& w, const Povm& a, const Povm& b);

} // namespace jointwork
