// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jointwork/povm.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace jointwork {

/// Search for a joint POVM K_ab with marginals A and B^U that reproduces the
/// sequential statistics on states diagonal in the probe basis:
///
///   minimize   Σ_{a,b,k} |Tr[(K_ab − A_a^{1/2} B^U_b A_a^{1/2}) Π_k]|
///   subject to Σ_b K_ab = A_a,  Σ_a K_ab = B^U_b,  K_ab ⪰ 0.
class FeasibilityProblem {
public:
    /// `probes` supplies the projectors Π_k (its eigenprojectors).
    FeasibilityProblem(Povm first, Povm second_heisenberg, SpectralHamiltonian probes);

    Eigen::Index dim() const noexcept { return first_.dim(); }
    const Povm& first() const noexcept { return first_; }
    const Povm& second() const noexcept { return second_; }
    const SpectralHamiltonian& probes() const noexcept { return probes_; }
    /// T_ab = A_a^{1/2} B^U_b A_a^{1/2}.
    const EffectGrid& targets() const noexcept { return targets_; }

    /// Σ_{a,b,k} |Tr[(K_ab − T_ab) Π_k]|.
    double objective(const EffectGrid& k) const;

private:
    Povm first_;
    Povm second_;
    SpectralHamiltonian probes_;
    EffectGrid targets_;
};

/// Problem for the noisy energy POVMs of H_A (visibility λ) and H_B
/// (visibility γ) with intermediate unitary U. λ = γ = 1 is allowed.
FeasibilityProblem make_feasibility_problem(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b,
                                            const ComplexMatrix& u, double lambda, double gamma);

enum class FeasibilityStatus { FeasibleZeroObjective, FeasiblePositiveObjective, Infeasible, MaxIterations };

std::string_view to_string(FeasibilityStatus status);

struct FeasibilityResult {
    FeasibilityStatus status = FeasibilityStatus::MaxIterations;
    EffectGrid grid{0, 0, 0};
    double objective = 0.0;
    double marginal_residual = 0.0;  ///< check_marginals of `grid`
    double min_eigenvalue = 0.0;     ///< over all cells of `grid`
    std::size_t iterations = 0;
    /// Distance between the marginal affine set and the PSD product cone per
    /// alternating-projection step (the infeasibility certificate).
    std::vector<double> gap_trace;
};

struct SolverOptions {
    double tol = 1e-7;
    std::size_t max_iter = 200000;
    /// Consecutive stalled iterations with gap > 10·tol before declaring
    /// the marginal constraints infeasible.
    std::size_t infeasible_window = 500;
};

/// First-order solver: alternating projections between the marginal affine
/// set and the PSD product cone establish (in)feasibility, then ADMM
/// minimizes the L1 statistics mismatch. `warm_start` (for instance the
/// square-root joint observable) is used as the initial iterate.
FeasibilityResult solve_joint_feasibility(const FeasibilityProblem& problem, const SolverOptions& options = {},
                                          const EffectGrid* warm_start = nullptr);

FeasibilityResult solve_joint_feasibility(const FeasibilityProblem& problem, double tol, std::size_t max_iter,
                                          const EffectGrid* warm_start = nullptr);

struct CriticalVisibilityOptions {
    double resolution = 1e-3;
    std::size_t max_iter = 200000;
    unsigned threads = 0; ///< 0 picks worker_threads()
};

/// Largest symmetric visibility λ = γ (to `resolution`) at which the program
/// reaches objective ≤ tol for every one of `n_unitaries` Haar-random U.
/// Throws InvalidArgument for n_unitaries = 0 and SolverNonConvergence when a
/// solve hits its iteration cap.
double estimate_critical_visibility(int dim, std::size_t n_unitaries, double tol, std::uint64_t seed,
                                    const CriticalVisibilityOptions& options = {});

/// Per-task seed derived from a base seed (splitmix64 step).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace jointwork
