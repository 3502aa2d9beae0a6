// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jointwork/bloch.hpp"
#include "jointwork/povm.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace jointwork {

enum class AssignmentKind { Naive, CorrectedMean, Jarzynski };

std::string_view to_string(AssignmentKind kind);

/// Energy estimate attached to each outcome of an unsharp energy POVM.
struct EnergyAssignment {
    AssignmentKind kind = AssignmentKind::Naive;
    RealVector values;
};

/// f(a) = E_a.
EnergyAssignment naive_assignment(const SpectralHamiltonian& h);

/// f(a) = E_a/λ − (1 − λ)/λ · Ē, which makes Σ_a f(a) A_a = H.
/// Throws ZeroVisibility for λ ≤ 0.
EnergyAssignment corrected_assignment(const SpectralHamiltonian& h, double visibility);

/// f(a) = (1/β) ln[(α Z/λ)(e^{βE_a} − (1 − λ)/d Σ_i e^{βE_i})], the choice
/// for which Σ_a e^{βf(a)} A_a^{1/2} ρ_Gibbs A_a^{1/2} = α·1. α defaults to
/// 1/Z. Throws AssignmentDomainError when a logarithm argument is not
/// positive.
EnergyAssignment jarzynski_assignment(const SpectralHamiltonian& h, double beta, double visibility,
                                      std::optional<double> alpha = std::nullopt);

/// Smallest visibility for which jarzynski_assignment is defined at β.
double jarzynski_min_visibility(const SpectralHamiltonian& h, double beta);

/// Â_f = Σ_a f(a) A_a. Throws SizeMismatch when |f| ≠ |A|.
Hermitian average_operator(const Povm& p, const EnergyAssignment& f);

struct PositivityAudit {
    double gamma_bound = 0.0;
    bool admissible = false;       ///< γ ≤ gamma_bound(d, λ)
    double min_eigenvalue = 0.0;   ///< over all W_ab
    std::size_t witness_a = 0;     ///< cell attaining min_eigenvalue
    std::size_t witness_b = 0;
    bool positive() const noexcept { return min_eigenvalue >= -1e-9; }
};

/// Square-root joint observable W_ab = A_a^{1/2} C_b A_a^{1/2} with
/// C_b = I_A⁻¹(Ψ_γ(U† Π'_b U)). Its marginals are A and B^U.
class JointWorkObservable {
public:
    JointWorkObservable(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b, const ComplexMatrix& unitary,
                        const VisibilityPair& pair);

    Eigen::Index dim() const noexcept { return first_.povm().dim(); }
    const VisibilityPair& visibilities() const noexcept { return pair_; }
    const ComplexMatrix& unitary() const noexcept { return unitary_; }
    const NoisyEnergyPovm& first() const noexcept { return first_; }
    const NoisyEnergyPovm& second() const noexcept { return second_; }
    const Povm& second_heisenberg() const noexcept { return second_heisenberg_; }
    const LuedersInstrument& instrument() const noexcept { return instrument_; }
    const EffectGrid& effects() const noexcept { return effects_; }
    const PositivityAudit& audit() const noexcept { return audit_; }

    /// w(a, b) = g(b) − f(a).
    Eigen::MatrixXd work_values(const EnergyAssignment& f, const EnergyAssignment& g) const;

private:
    VisibilityPair pair_;
    ComplexMatrix unitary_;
    NoisyEnergyPovm first_;
    NoisyEnergyPovm second_;
    Povm second_heisenberg_;
    LuedersInstrument instrument_;
    EffectGrid effects_;
    PositivityAudit audit_;
};

/// Throws NonInvertibleInstrument (λ = 1 cannot be represented by
/// VisibilityPair, so this only fires for λ within 1e−9 of 1), NotUnitary or
/// DimMismatch. Positivity violations land in audit(), they do not throw.
JointWorkObservable build_joint_observable(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b,
                                           const ComplexMatrix& unitary, const VisibilityPair& pair);

/// Ŵ_w = Σ_ab w(a, b) W_ab.
Hermitian work_average_operator(const JointWorkObservable& w, const EnergyAssignment& f, const EnergyAssignment& g);

struct WorkOutcome {
    std::size_t a;
    std::size_t b;
    double work;
    double probability;
};

/// Grid-indexed work outcomes; equal work values at different (a, b) stay
/// separate entries.
struct WorkDistribution {
    std::vector<WorkOutcome> entries;

    double total_probability() const;
    double mean_work() const;
};

WorkDistribution work_distribution(const JointWorkObservable& w, const Hermitian& rho, const EnergyAssignment& f,
                                   const EnergyAssignment& g);

/// Σ p e^{−βw}.
double jarzynski_sum(const WorkDistribution& dist, double beta);

} // namespace jointwork
