// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jointwork/povm.hpp"
#include "jointwork/workobs.hpp"

#include <cstdint>

namespace jointwork {

/// ρ = Σ_a e^{−βE_a}/Z · Π_a.
struct GibbsState {
    double beta;
    SpectralHamiltonian hamiltonian;
    RealVector populations;
    Hermitian rho;
    double partition_function;
    double log_partition_function;
};

GibbsState gibbs_state(const SpectralHamiltonian& h, double beta);

/// ln Z with Z = Σ_a e^{−βE_a}, evaluated without overflow.
double log_partition_function(const SpectralHamiltonian& h, double beta);

/// ΔF = −(1/β) ln(Z_B/Z_A).
double free_energy_difference(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b, double beta);

/// Z_B/Z_A = e^{−βΔF}.
double partition_ratio(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b, double beta);

/// ρ_Δ = Σ_k p_k Π_k in the eigenbasis of `basis`. Probabilities must be
/// non-negative and sum to 1 within 1e−12.
class DiagonalState {
public:
    DiagonalState(RealVector probabilities, SpectralHamiltonian basis);

    const RealVector& probabilities() const noexcept { return probabilities_; }
    const SpectralHamiltonian& basis() const noexcept { return basis_; }
    const Hermitian& rho() const noexcept { return rho_; }

private:
    RealVector probabilities_;
    SpectralHamiltonian basis_;
    Hermitian rho_;
};

/// Row-major (a, b) grid of probabilities or counts.
using ProbabilityGrid = Eigen::MatrixXd;
using CountGrid = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// p(a, b) = Tr[B_b U I_a(ρ) U†] for the Lüders instrument I.
ProbabilityGrid gtpm_distribution(const Hermitian& rho, const LuedersInstrument& instrument, const ComplexMatrix& u,
                                  const Povm& b);

/// Monte Carlo run of the sequential protocol: draw a from Tr[A_a ρ], update
/// to I_a(ρ)/p(a), evolve, draw b. Deterministic per seed.
CountGrid sample_gtpm(const Hermitian& rho, const LuedersInstrument& instrument, const ComplexMatrix& u,
                      const Povm& b, std::uint64_t n, std::uint64_t seed);

/// max_ab |Tr[W_ab ρ_Δ] − p_GTPM(a, b)| for an arbitrary effect grid.
/// Throws BasisMismatch when ρ_Δ is not diagonal in the instrument's energy
/// basis.
double fluctuation_residual(const EffectGrid& w, const LuedersInstrument& instrument, const ComplexMatrix& u,
                            const Povm& b, const DiagonalState& rho);

/// As above for a square-root joint observable; W must have been built from
/// the same instrument and unitary.
double fluctuation_residual(const JointWorkObservable& w, const LuedersInstrument& instrument,
                            const ComplexMatrix& u, const Povm& b, const DiagonalState& rho);

/// ‖Σ_a e^{βf(a)} I_a(ρ_Gibbs) − α·1‖_max.
double jarzynski_identity_residual(const LuedersInstrument& instrument, const EnergyAssignment& f,
                                   const GibbsState& gibbs, double alpha);

} // namespace jointwork
