// SPDX-License-Identifier: Apache-2.0
#include "jointwork/gtpm.hpp"

#include "jointwork/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace jointwork {

namespace {

void require_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive and finite");
}

void require_same_basis(const SpectralHamiltonian& expected, const SpectralHamiltonian& actual) {
    if (expected.dim() != actual.dim()) throw BasisMismatch("state and instrument dimensions differ");
    for (std::size_t k = 0; k < static_cast<std::size_t>(expected.dim()); ++k) {
        if (max_abs(expected.projector(k) - actual.projector(k)) > 1e-10) {
            throw BasisMismatch("state projector " + std::to_string(k) + " differs from the energy projector");
        }
    }
}

} // namespace

double log_partition_function(const SpectralHamiltonian& h, double beta) {
    require_beta(beta);
    const double bottom = h.energies().minCoeff();
    return -beta * bottom + std::log((-beta * (h.energies().array() - bottom)).exp().sum());
}

GibbsState gibbs_state(const SpectralHamiltonian& h, double beta) {
    require_beta(beta);
    const double bottom = h.energies().minCoeff();
    RealVector weights = (-beta * (h.energies().array() - bottom)).exp().matrix();
    const double total = weights.sum();
    RealVector populations = weights / total;
    ComplexMatrix rho = ComplexMatrix::Zero(h.dim(), h.dim());
    for (Eigen::Index a = 0; a < h.dim(); ++a) rho += populations(a) * h.projector(static_cast<std::size_t>(a));
    const double log_z = -beta * bottom + std::log(total);
    return {beta, h, std::move(populations), Hermitian::projected(rho), std::exp(log_z), log_z};
}

double free_energy_difference(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b, double beta) {
    return -(log_partition_function(h_b, beta) - log_partition_function(h_a, beta)) / beta;
}

double partition_ratio(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b, double beta) {
    return std::exp(log_partition_function(h_b, beta) - log_partition_function(h_a, beta));
}

DiagonalState::DiagonalState(RealVector probabilities, SpectralHamiltonian basis)
    : probabilities_(std::move(probabilities)), basis_(std::move(basis)), rho_(Hermitian::identity(basis_.dim())) {
    if (probabilities_.size() != basis_.dim()) throw DimMismatch("probability count does not match dimension");
    if ((probabilities_.array() < 0.0).any() || !probabilities_.allFinite()) {
        throw InvalidArgument("probabilities must be non-negative");
    }
    if (std::abs(probabilities_.sum() - 1.0) > 1e-12) throw InvalidArgument("probabilities must sum to 1");
    ComplexMatrix rho = ComplexMatrix::Zero(basis_.dim(), basis_.dim());
    for (Eigen::Index k = 0; k < basis_.dim(); ++k) {
        rho += probabilities_(k) * basis_.projector(static_cast<std::size_t>(k));
    }
    rho_ = Hermitian::projected(rho);
}

ProbabilityGrid gtpm_distribution(const Hermitian& rho, const LuedersInstrument& instrument, const ComplexMatrix& u,
                                  const Povm& b) {
    if (rho.dim() != instrument.dim() || b.dim() != instrument.dim() || u.rows() != instrument.dim()) {
        throw DimMismatch("state, instrument, unitary and final POVM must share the dimension");
    }
    require_density_operator(rho);
    if (unitarity_defect(u) > 1e-10) throw NotUnitary("intermediate evolution");

    ProbabilityGrid p(static_cast<Eigen::Index>(instrument.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t a = 0; a < instrument.size(); ++a) {
        const ComplexMatrix evolved = u * luders_apply(instrument, a, rho).matrix() * u.adjoint();
        for (std::size_t j = 0; j < b.size(); ++j) {
            p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) =
                trace_product(b.effect(j).matrix(), evolved);
        }
    }
    return p;
}

CountGrid sample_gtpm(const Hermitian& rho, const LuedersInstrument& instrument, const ComplexMatrix& u,
                      const Povm& b, std::uint64_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("sample count must be at least 1");
    require_density_operator(rho);
    if (unitarity_defect(u) > 1e-10) throw NotUnitary("intermediate evolution");

    const std::size_t na = instrument.size();
    std::vector<double> first(na, 0.0);
    std::vector<std::discrete_distribution<std::size_t>> second;
    second.reserve(na);
    for (std::size_t a = 0; a < na; ++a) {
        const Hermitian post = luders_apply(instrument, a, rho);
        const double pa = post.trace();
        first[a] = std::max(pa, 0.0);
        std::vector<double> cond(b.size(), 1.0);
        if (pa > 0.0) {
            const ComplexMatrix evolved = u * (post.matrix() / pa) * u.adjoint();
            for (std::size_t j = 0; j < b.size(); ++j) cond[j] = std::max(trace_product(b.effect(j).matrix(), evolved), 0.0);
        }
        second.emplace_back(cond.begin(), cond.end());
    }
    std::discrete_distribution<std::size_t> draw_first(first.begin(), first.end());

    std::mt19937_64 rng(seed);
    CountGrid counts = CountGrid::Zero(static_cast<Eigen::Index>(na), static_cast<Eigen::Index>(b.size()));
    for (std::uint64_t t = 0; t < n; ++t) {
        const std::size_t a = draw_first(rng);
        const std::size_t j = second[a](rng);
        ++counts(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j));
    }
    return counts;
}

double fluctuation_residual(const EffectGrid& w, const LuedersInstrument& instrument, const ComplexMatrix& u,
                            const Povm& b, const DiagonalState& rho) {
    if (!instrument.hamiltonian()) throw BasisMismatch("instrument carries no energy basis");
    require_same_basis(*instrument.hamiltonian(), rho.basis());
    if (w.rows() != instrument.size() || w.cols() != b.size()) throw ShapeMismatch("grid does not match POVMs");

    const ProbabilityGrid sequential = gtpm_distribution(rho.rho(), instrument, u, b);
    double worst = 0.0;
    for (std::size_t a = 0; a < w.rows(); ++a) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const double joint = trace_product(w(a, j), rho.rho().matrix());
            worst = std::max(worst,
                             std::abs(joint - sequential(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j))));
        }
    }
    return worst;
}

double fluctuation_residual(const JointWorkObservable& w, const LuedersInstrument& instrument,
                            const ComplexMatrix& u, const Povm& b, const DiagonalState& rho) {
    if (instrument.visibility() != w.first().visibility()) {
        throw InvalidArgument("instrument visibility differs from the observable's");
    }
    if (u.rows() != w.dim() || max_abs(u - w.unitary()) > 1e-12) {
        throw InvalidArgument("unitary differs from the one the observable was built with");
    }
    return fluctuation_residual(w.effects(), instrument, u, b, rho);
}

double jarzynski_identity_residual(const LuedersInstrument& instrument, const EnergyAssignment& f,
                                   const GibbsState& gibbs, double alpha) {
    if (static_cast<std::size_t>(f.values.size()) != instrument.size()) throw SizeMismatch("assignment size");
    ComplexMatrix sum = ComplexMatrix::Zero(instrument.dim(), instrument.dim());
    for (std::size_t a = 0; a < instrument.size(); ++a) {
        sum += std::exp(gibbs.beta * f.values(static_cast<Eigen::Index>(a))) *
               luders_apply(instrument, a, gibbs.rho).matrix();
    }
    return max_abs(sum - alpha * ComplexMatrix::Identity(instrument.dim(), instrument.dim()));
}

} // namespace jointwork
