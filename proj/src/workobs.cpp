// SPDX-License-Identifier: Apache-2.0
#include "jointwork/workobs.hpp"

#include "jointwork/errors.hpp"

#include <cmath>
#include <string>

namespace jointwork {

std::string_view to_string(AssignmentKind kind) {
    switch (kind) {
    case AssignmentKind::Naive: return "naive";
    case AssignmentKind::CorrectedMean: return "corrected";
    case AssignmentKind::Jarzynski: return "jarzynski";
    }
    return "unknown";
}

EnergyAssignment naive_assignment(const SpectralHamiltonian& h) { return {AssignmentKind::Naive, h.energies()}; }

EnergyAssignment corrected_assignment(const SpectralHamiltonian& h, double visibility) {
    if (!(visibility > 0.0)) throw ZeroVisibility("corrected energies need a positive visibility");
    const double mean = h.mean_energy();
    RealVector f = h.energies() / visibility - RealVector::Constant(h.dim(), (1.0 - visibility) / visibility * mean);
    return {AssignmentKind::CorrectedMean, std::move(f)};
}

double jarzynski_min_visibility(const SpectralHamiltonian& h, double beta) {
    const RealVector& e = h.energies();
    const double top = e.maxCoeff();
    // Work relative to the largest energy so the exponentials stay bounded.
    const RealVector shifted = (beta * (e.array() - top)).exp().matrix();
    return 1.0 - static_cast<double>(h.dim()) * shifted.minCoeff() / shifted.sum();
}

EnergyAssignment jarzynski_assignment(const SpectralHamiltonian& h, double beta, double visibility,
                                      std::optional<double> alpha) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    if (!(visibility > 0.0 && visibility <= 1.0)) throw InvalidArgument("visibility must lie in (0, 1]");
    const RealVector& e = h.energies();
    const double d = static_cast<double>(h.dim());
    const double top = e.maxCoeff();
    const RealVector up = (beta * (e.array() - top)).exp().matrix();
    const double up_sum = up.sum();

    // α Z_A, with Z_A = Σ e^{−βE}.
    double alpha_z = 1.0;
    if (alpha) {
        if (!(*alpha > 0.0)) throw InvalidArgument("alpha must be positive");
        const double bottom = e.minCoeff();
        const double z = std::exp(-beta * bottom) * (-beta * (e.array() - bottom)).exp().sum();
        alpha_z = *alpha * z;
    }

    RealVector f(h.dim());
    for (Eigen::Index a = 0; a < h.dim(); ++a) {
        const double arg = up(a) - (1.0 - visibility) / d * up_sum;
        if (!(arg > 0.0)) {
            const double min_vis = jarzynski_min_visibility(h, beta);
            throw AssignmentDomainError(static_cast<std::size_t>(a), min_vis,
                                        "logarithm argument for outcome " + std::to_string(a) +
                                            " is not positive; visibility must exceed " + std::to_string(min_vis));
        }
        f(a) = top + std::log(alpha_z / visibility * arg) / beta;
    }
    return {AssignmentKind::Jarzynski, std::move(f)};
}

Hermitian average_operator(const Povm& p, const EnergyAssignment& f) {
    if (static_cast<std::size_t>(f.values.size()) != p.size()) {
        throw SizeMismatch("assignment has " + std::to_string(f.values.size()) + " values for " +
                           std::to_string(p.size()) + " effects");
    }
    ComplexMatrix sum = ComplexMatrix::Zero(p.dim(), p.dim());
    for (std::size_t a = 0; a < p.size(); ++a) sum += f.values(static_cast<Eigen::Index>(a)) * p.effect(a).matrix();
    return Hermitian::projected(sum);
}

JointWorkObservable::JointWorkObservable(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b,
                                         const ComplexMatrix& unitary, const VisibilityPair& pair)
    : pair_(pair),
      unitary_(unitary),
      first_(h_a, pair.lambda()),
      second_(h_b, pair.gamma()),
      second_heisenberg_(heisenberg_povm(second_.povm(), unitary)),
      instrument_(first_),
      effects_(static_cast<std::size_t>(h_a.dim()), static_cast<std::size_t>(h_b.dim()), h_a.dim()) {
    const Eigen::Index d = h_a.dim();
    if (h_b.dim() != d) throw DimMismatch("initial and final Hamiltonians have different dimensions");
    if (d < 2) throw InvalidArgument("joint observable needs d >= 2");

    audit_.gamma_bound = gamma_bound(static_cast<int>(d), pair.lambda());
    audit_.admissible = pair.gamma() <= audit_.gamma_bound;
    audit_.min_eigenvalue = std::numeric_limits<double>::infinity();

    for (std::size_t b = 0; b < effects_.cols(); ++b) {
        const Hermitian rotated = Hermitian::projected(unitary.adjoint() * h_b.projector(b) * unitary);
        const ComplexMatrix aux = inverse_instrument_channel(instrument_, depolarize(rotated, pair.gamma())).matrix();
        for (std::size_t a = 0; a < effects_.rows(); ++a) {
            const ComplexMatrix& r = instrument_.sqrt_effect(a).matrix();
            const Hermitian cell = Hermitian::projected(r * aux * r);
            effects_(a, b) = cell.matrix();
            const double lo = min_eigenvalue(cell);
            if (lo < audit_.min_eigenvalue) {
                audit_.min_eigenvalue = lo;
                audit_.witness_a = a;
                audit_.witness_b = b;
            }
        }
    }
}

Eigen::MatrixXd JointWorkObservable::work_values(const EnergyAssignment& f, const EnergyAssignment& g) const {
    const auto rows = static_cast<Eigen::Index>(effects_.rows());
    const auto cols = static_cast<Eigen::Index>(effects_.cols());
    if (f.values.size() != rows || g.values.size() != cols) throw SizeMismatch("assignment sizes do not match grid");
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index a = 0; a < rows; ++a) {
        for (Eigen::Index b = 0; b < cols; ++b) w(a, b) = g.values(b) - f.values(a);
    }
    return w;
}

JointWorkObservable build_joint_observable(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b,
                                           const ComplexMatrix& unitary, const VisibilityPair& pair) {
    return JointWorkObservable(h_a, h_b, unitary, pair);
}

Hermitian work_average_operator(const JointWorkObservable& w, const EnergyAssignment& f, const EnergyAssignment& g) {
    const Eigen::MatrixXd values = w.work_values(f, g);
    ComplexMatrix sum = ComplexMatrix::Zero(w.dim(), w.dim());
    for (std::size_t a = 0; a < w.effects().rows(); ++a) {
        for (std::size_t b = 0; b < w.effects().cols(); ++b) {
            sum += values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * w.effects()(a, b);
        }
    }
    return Hermitian::projected(sum);
}

double WorkDistribution::total_probability() const {
    double t = 0.0;
    for (const auto& e : entries) t += e.probability;
    return t;
}

double WorkDistribution::mean_work() const {
    double m = 0.0;
    for (const auto& e : entries) m += e.probability * e.work;
    return m;
}

WorkDistribution work_distribution(const JointWorkObservable& w, const Hermitian& rho, const EnergyAssignment& f,
                                   const EnergyAssignment& g) {
    if (rho.dim() != w.dim()) throw DimMismatch("state dimension does not match observable");
    require_density_operator(rho);
    const Eigen::MatrixXd values = w.work_values(f, g);
    WorkDistribution dist;
    dist.entries.reserve(w.effects().rows() * w.effects().cols());
    for (std::size_t a = 0; a < w.effects().rows(); ++a) {
        for (std::size_t b = 0; b < w.effects().cols(); ++b) {
            dist.entries.push_back({a, b, values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)),
                                    trace_product(w.effects()(a, b), rho.matrix())});
        }
    }
    return dist;
}

double jarzynski_sum(const WorkDistribution& dist, double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    double s = 0.0;
    for (const auto& e : dist.entries) s += e.probability * std::exp(-beta * e.work);
    return s;
}

} // namespace jointwork
