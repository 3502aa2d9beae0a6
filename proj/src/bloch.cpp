// SPDX-License-Identifier: Apache-2.0
#include "jointwork/bloch.hpp"

#include "jointwork/errors.hpp"

#include <cmath>
#include <string>

namespace jointwork {

namespace {

void require_dim(int dim) {
    if (dim < 2) throw InvalidArgument("dimension must be at least 2, got " + std::to_string(dim));
}

void require_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

} // namespace

GellMannBasis::GellMannBasis(const ComplexMatrix& frame) : dim_(frame.rows()), frame_(frame) {
    if (frame.rows() != frame.cols()) throw DimMismatch("frame must be square");
    if (dim_ < 2) throw InvalidArgument("Gell-Mann basis needs d >= 2");
    if (unitarity_defect(frame) > 1e-10) throw NotUnitary("basis frame");

    const Eigen::Index d = dim_;
    auto unit = [&](Eigen::Index j, Eigen::Index k) -> ComplexMatrix {
        return frame_.col(j) * frame_.col(k).adjoint();
    };
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    generators_.reserve(static_cast<std::size_t>(d * d));
    generators_.push_back(ComplexMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = j + 1; k < d; ++k) {
            generators_.push_back(inv_sqrt2 * (unit(j, k) + unit(k, j)));
        }
    }
    const Complex minus_i(0.0, -1.0);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = j + 1; k < d; ++k) {
            generators_.push_back(minus_i * inv_sqrt2 * (unit(j, k) - unit(k, j)));
        }
    }
    for (Eigen::Index l = 1; l < d; ++l) {
        ComplexMatrix g = ComplexMatrix::Zero(d, d);
        for (Eigen::Index n = 0; n < l; ++n) g += unit(n, n);
        g -= static_cast<double>(l) * unit(l, l);
        generators_.push_back(g / std::sqrt(static_cast<double>(l * (l + 1))));
    }
}

GellMannBasis build_basis(Eigen::Index dim) {
    if (dim < 2) throw InvalidArgument("Gell-Mann basis needs d >= 2");
    return GellMannBasis(ComplexMatrix::Identity(dim, dim));
}

GellMannBasis build_basis(const ComplexMatrix& frame) { return GellMannBasis(frame); }

Eigen::VectorXcd to_bloch_complex(const ComplexMatrix& x, const GellMannBasis& basis) {
    if (x.rows() != basis.dim() || x.cols() != basis.dim()) {
        throw DimMismatch("operator is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                          ", basis has d=" + std::to_string(basis.dim()));
    }
    Eigen::VectorXcd c(basis.size());
    for (Eigen::Index mu = 0; mu < basis.size(); ++mu) {
        c(mu) = basis.generator(mu).transpose().cwiseProduct(x).sum();
    }
    return c;
}

ComplexMatrix from_bloch_complex(const Eigen::VectorXcd& c, const GellMannBasis& basis) {
    if (c.size() != basis.size()) throw DimMismatch("coefficient count does not match basis");
    ComplexMatrix x = ComplexMatrix::Zero(basis.dim(), basis.dim());
    for (Eigen::Index mu = 0; mu < basis.size(); ++mu) x += c(mu) * basis.generator(mu);
    return x;
}

BlochVector to_bloch(const Hermitian& x, const GellMannBasis& basis) {
    return {basis.dim(), to_bloch_complex(x.matrix(), basis).real()};
}

Hermitian from_bloch(const BlochVector& v, const GellMannBasis& basis) {
    if (v.dim != basis.dim()) throw DimMismatch("Bloch vector dimension does not match basis");
    return Hermitian::projected(from_bloch_complex(v.coefficients.cast<Complex>(), basis));
}

ComplexMatrix BlochChannelMatrix::apply(const ComplexMatrix& x, const GellMannBasis& basis) const {
    if (basis.dim() != dim) throw DimMismatch("channel matrix dimension does not match basis");
    const Eigen::VectorXcd c = to_bloch_complex(x, basis);
    return from_bloch_complex(matrix.cast<Complex>() * c, basis);
}

BlochChannelMatrix channel_matrix(const OperatorMap& map, const GellMannBasis& basis) {
    const Eigen::Index n = basis.size();
    std::vector<ComplexMatrix> images;
    images.reserve(static_cast<std::size_t>(n));
    for (const auto& g : basis.generators()) {
        ComplexMatrix img = map(g);
        if (img.rows() != basis.dim() || img.cols() != basis.dim()) {
            throw DimMismatch("map changed the operator dimension");
        }
        images.push_back(std::move(img));
    }

    // Spot-check linearity on neighbouring generator pairs.
    for (Eigen::Index mu = 0; mu < n; ++mu) {
        const Eigen::Index nu = (mu + 1) % n;
        const auto& gm = basis.generator(mu);
        const auto& gn = basis.generator(nu);
        const auto& im = images[static_cast<std::size_t>(mu)];
        const auto& in = images[static_cast<std::size_t>(nu)];
        const double scale = 1.0 + max_abs(im) + max_abs(in);
        if (max_abs(map(ComplexMatrix(gm + gn)) - im - in) > 1e-10 * scale ||
            max_abs(map(ComplexMatrix(2.0 * gm)) - 2.0 * im) > 1e-10 * scale) {
            throw NonlinearMap("additivity/homogeneity check failed at generators " + std::to_string(mu) +
                               ", " + std::to_string(nu));
        }
    }

    BlochChannelMatrix out{basis.dim(), Eigen::MatrixXd(n, n)};
    for (Eigen::Index mu = 0; mu < n; ++mu) {
        for (Eigen::Index nu = 0; nu < n; ++nu) {
            const Complex entry =
                basis.generator(mu).transpose().cwiseProduct(images[static_cast<std::size_t>(nu)]).sum();
            if (std::abs(entry.imag()) > 1e-10) {
                throw NotHermitian("map is not Hermiticity preserving (imaginary Bloch entry " +
                                   std::to_string(entry.imag()) + ")");
            }
            out.matrix(mu, nu) = entry.real();
        }
    }
    return out;
}

VisibilityPair::VisibilityPair(double lambda, double gamma) : lambda_(lambda), gamma_(gamma) {
    if (!(lambda > 0.0 && lambda < 1.0) || !(gamma > 0.0 && gamma < 1.0)) {
        throw InvalidArgument("visibilities must lie strictly inside (0, 1), got lambda=" + std::to_string(lambda) +
                              " gamma=" + std::to_string(gamma));
    }
}

double kappa(int dim, double lambda) {
    require_dim(dim);
    require_unit_interval(lambda, "lambda");
    const double d = dim;
    const double noise = (1.0 - lambda) / d;
    return 2.0 * std::sqrt(lambda + noise) * std::sqrt(noise) + (d - 2.0) * noise;
}

double gamma_bound(int dim, double lambda) {
    const double k = kappa(dim, lambda);
    const double d = dim;
    return 2.0 * k / (d + 2.0 * k - d * k);
}

double symmetric_critical_visibility(int dim) {
    require_dim(dim);
    // gamma_bound(d, 0) = 1 and gamma_bound(d, 1) = 0, and the bound decreases
    // in λ, so λ ↦ gamma_bound(d, λ) − λ has a single sign change on [0, 1].
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_bound(dim, mid) - mid > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ReferenceVisibilities reference_visibilities(int dim, MubFormula mub) {
    require_dim(dim);
    const double d = dim;
    const double opt = (d - 2.0 + std::sqrt(d * d + 4.0 * d - 4.0)) / (4.0 * (d - 1.0));
    const double inv = 1.0 / (std::sqrt(d) + 1.0);
    const double mub_value = mub == MubFormula::Corrected ? 0.5 * (1.0 + inv) : 0.5 * inv;
    return {opt, mub_value};
}

} // namespace jointwork
