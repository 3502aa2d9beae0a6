// SPDX-License-Identifier: Apache-2.0
#include "jointwork/povm.hpp"

#include "jointwork/errors.hpp"

#include <cmath>
#include <string>

namespace jointwork {

namespace {

constexpr double kInvertibilityGap = 1e-9;

std::vector<Hermitian> noisy_effect_list(const SpectralHamiltonian& h, double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw InvalidArgument("visibility must lie in [0, 1], got " + std::to_string(visibility));
    }
    const Eigen::Index d = h.dim();
    const ComplexMatrix noise = ComplexMatrix::Identity(d, d) * ((1.0 - visibility) / static_cast<double>(d));
    std::vector<Hermitian> out;
    out.reserve(static_cast<std::size_t>(d));
    for (const auto& p : h.projectors()) out.push_back(Hermitian::projected(visibility * p + noise));
    return out;
}

} // namespace

Povm::Povm(std::vector<Hermitian> effects) : effects_(std::move(effects)) {
    if (effects_.empty()) throw InvalidPovm("POVM needs at least one effect");
    const Eigen::Index d = effects_.front().dim();
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    for (std::size_t a = 0; a < effects_.size(); ++a) {
        if (effects_[a].dim() != d) throw DimMismatch("effects have different dimensions");
        const double lo = min_eigenvalue(effects_[a]);
        if (lo < -kPovmTol) {
            throw InvalidPovm("effect " + std::to_string(a) + " has eigenvalue " + std::to_string(lo));
        }
        total += effects_[a].matrix();
    }
    const double defect = max_abs(total - ComplexMatrix::Identity(d, d));
    if (defect > kPovmTol) throw InvalidPovm("effects sum to identity only within " + std::to_string(defect));
}

const Hermitian& Povm::effect(std::size_t a) const {
    if (a >= effects_.size()) throw IndexOutOfRange("outcome " + std::to_string(a));
    return effects_[a];
}

Povm Povm::trivial(Eigen::Index dim, std::size_t outcomes) {
    if (outcomes == 0) throw InvalidPovm("POVM needs at least one effect");
    return Povm(std::vector<Hermitian>(outcomes, Hermitian::identity(dim) * (1.0 / static_cast<double>(outcomes))));
}

NoisyEnergyPovm::NoisyEnergyPovm(SpectralHamiltonian hamiltonian, double visibility)
    : hamiltonian_(std::move(hamiltonian)),
      visibility_(visibility),
      povm_(noisy_effect_list(hamiltonian_, visibility)) {}

NoisyEnergyPovm noisy_effects(const SpectralHamiltonian& h, double visibility) {
    return NoisyEnergyPovm(h, visibility);
}

LuedersInstrument::LuedersInstrument(Povm povm) : povm_(std::move(povm)) {
    sqrt_effects_.reserve(povm_.size());
    for (const auto& e : povm_.effects()) sqrt_effects_.push_back(matrix_sqrt_psd(e));
}

LuedersInstrument::LuedersInstrument(const NoisyEnergyPovm& noisy) : LuedersInstrument(noisy.povm()) {
    hamiltonian_ = noisy.hamiltonian();
    visibility_ = noisy.visibility();
    if (hamiltonian_->dim() >= 2) basis_ = std::make_shared<const GellMannBasis>(hamiltonian_->frame());
}

const Hermitian& LuedersInstrument::sqrt_effect(std::size_t a) const {
    if (a >= sqrt_effects_.size()) throw IndexOutOfRange("outcome " + std::to_string(a));
    return sqrt_effects_[a];
}

const GellMannBasis& LuedersInstrument::aligned_basis() const {
    if (!basis_) throw Error("instrument has no energy-aligned basis");
    return *basis_;
}

void require_density_operator(const Hermitian& rho) {
    if (std::abs(rho.trace() - 1.0) > kPovmTol) {
        throw InvalidArgument("state must have unit trace, got " + std::to_string(rho.trace()));
    }
    const double lo = min_eigenvalue(rho);
    if (lo < -kPsdClampTol) throw NotPsd("state has eigenvalue " + std::to_string(lo));
}

Hermitian luders_apply(const LuedersInstrument& instrument, std::size_t a, const Hermitian& rho) {
    const ComplexMatrix& r = instrument.sqrt_effect(a).matrix();
    if (rho.dim() != instrument.dim()) throw DimMismatch("state dimension does not match instrument");
    require_density_operator(rho);
    return Hermitian::projected(r * rho.matrix() * r);
}

ComplexMatrix instrument_channel(const LuedersInstrument& instrument, const ComplexMatrix& x) {
    if (x.rows() != instrument.dim() || x.cols() != instrument.dim()) {
        throw DimMismatch("operator dimension does not match instrument");
    }
    ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
    for (std::size_t a = 0; a < instrument.size(); ++a) {
        const ComplexMatrix& r = instrument.sqrt_effect(a).matrix();
        out += r * x * r;
    }
    return out;
}

Hermitian instrument_channel(const LuedersInstrument& instrument, const Hermitian& x) {
    return Hermitian::projected(instrument_channel(instrument, x.matrix()));
}

Hermitian inverse_instrument_channel(const LuedersInstrument& instrument, const Hermitian& x) {
    const auto visibility = instrument.visibility();
    if (!visibility) throw NonInvertibleInstrument("inverse is only available for noisy energy instruments");
    if (*visibility >= 1.0 - kInvertibilityGap) {
        throw NonInvertibleInstrument("visibility " + std::to_string(*visibility) +
                                      " is projective; the instrument channel is not invertible");
    }
    const GellMannBasis& basis = instrument.aligned_basis();
    const double k = kappa(static_cast<int>(instrument.dim()), *visibility);
    BlochVector v = to_bloch(x, basis);
    v.coefficients.segment(1, basis.off_diagonal_count()) /= k;
    return from_bloch(v, basis);
}

Hermitian depolarize(const Hermitian& x, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
    const double d = static_cast<double>(x.dim());
    return Hermitian::projected(gamma * x.matrix() +
                                (1.0 - gamma) * x.trace() / d * ComplexMatrix::Identity(x.dim(), x.dim()));
}

Povm heisenberg_povm(const Povm& b, const ComplexMatrix& u) {
    if (u.rows() != b.dim() || u.cols() != b.dim()) throw DimMismatch("unitary dimension does not match POVM");
    const double defect = unitarity_defect(u);
    if (defect > 1e-10) throw NotUnitary("max |U^dag U - 1| = " + std::to_string(defect));
    std::vector<Hermitian> out;
    out.reserve(b.size());
    for (const auto& e : b.effects()) out.push_back(Hermitian::projected(u.adjoint() * e.matrix() * u));
    return Povm(std::move(out));
}

EffectGrid::EffectGrid(std::size_t rows, std::size_t cols, Eigen::Index dim)
    : rows_(rows), cols_(cols), dim_(dim), cells_(rows * cols, ComplexMatrix::Zero(dim, dim)) {}

double EffectGrid::min_eigenvalue() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& c : cells_) lo = std::min(lo, jointwork::min_eigenvalue(Hermitian::projected(c)));
    return lo;
}

double check_marginals(const EffectGrid& w, const Povm& a, const Povm& b) {
    if (w.rows() != a.size() || w.cols() != b.size()) {
        throw ShapeMismatch("grid is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                            ", marginals need " + std::to_string(a.size()) + "x" + std::to_string(b.size()));
    }
    if (w.dim() != a.dim() || w.dim() != b.dim()) throw DimMismatch("grid and POVM dimensions differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        ComplexMatrix row = -a.effect(i).matrix();
        for (std::size_t j = 0; j < w.cols(); ++j) row += w(i, j);
        worst = std::max(worst, max_abs(row));
    }
    for (std::size_t j = 0; j < w.cols(); ++j) {
        ComplexMatrix col = -b.effect(j).matrix();
        for (std::size_t i = 0; i < w.rows(); ++i) col += w(i, j);
        worst = std::max(worst, max_abs(col));
    }
    return worst;
}

} // namespace jointwork
