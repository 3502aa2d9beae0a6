// SPDX-License-Identifier: Apache-2.0
#include "jointwork/choi.hpp"

#include "jointwork/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace jointwork {

namespace {

constexpr double kInvertibilityGap = 1e-9;

void require_invertible(double lambda) {
    if (lambda >= 1.0 - kInvertibilityGap) {
        throw NonInvertibleInstrument("the Lueders channel of a projective measurement has no inverse");
    }
}

// Lowest eigenvector of a Hermitian matrix (symmetrized first).
Eigen::VectorXcd lowest_eigenvector(const ComplexMatrix& m, double* value) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
    *value = es.eigenvalues()(0);
    return es.eigenvectors().col(0);
}

ComplexMatrix contract_first(const ComplexMatrix& dm, const Eigen::VectorXcd& a, Eigen::Index d) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m += std::conj(a(i)) * a(j) * dm.block(i * d, j * d, d, d);
        }
    }
    return m;
}

ComplexMatrix contract_second(const ComplexMatrix& dm, const Eigen::VectorXcd& b, Eigen::Index d) {
    ComplexMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m(i, j) = b.dot(dm.block(i * d, j * d, d, d) * b);
        }
    }
    return m;
}

double product_expectation(const ComplexMatrix& dm, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    Eigen::VectorXcd psi(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) psi.segment(i * b.size(), b.size()) = a(i) * b;
    return psi.dot(dm * psi).real();
}

} // namespace

double choi_margin_closed_form(int dim, double lambda, double gamma) {
    require_invertible(lambda);
    const double d = dim;
    const double k = kappa(dim, lambda);
    return 1.0 - gamma + d * gamma / 2.0 - d * gamma / (2.0 * k);
}

ComplexMatrix scaled_choi_matrix(int dim, double lambda, double gamma) {
    require_invertible(lambda);
    const Eigen::Index d = dim;
    const GellMannBasis basis = build_basis(d);

    std::vector<ComplexMatrix> roots;
    for (Eigen::Index a = 0; a < d; ++a) {
        RealVector diag = RealVector::Constant(d, (1.0 - lambda) / static_cast<double>(d));
        diag(a) += lambda;
        roots.push_back(matrix_sqrt_psd(Hermitian::diagonal(diag)).matrix());
    }
    const OperatorMap lueders = [&](const ComplexMatrix& x) {
        ComplexMatrix out = ComplexMatrix::Zero(d, d);
        for (const auto& r : roots) out += r * x * r;
        return out;
    };
    const OperatorMap depolarizer = [&](const ComplexMatrix& x) {
        return ComplexMatrix(gamma * x + (1.0 - gamma) * x.trace() / static_cast<double>(d) *
                                             ComplexMatrix::Identity(d, d));
    };
    const BlochChannelMatrix lam = channel_matrix(lueders, basis);
    const BlochChannelMatrix ups = channel_matrix(depolarizer, basis);
    const BlochChannelMatrix xi{d, lam.matrix.fullPivLu().solve(ups.matrix)};

    ComplexMatrix dm = ComplexMatrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            ComplexMatrix unit = ComplexMatrix::Zero(d, d);
            unit(i, j) = 1.0;
            dm.block(i * d, j * d, d, d) = static_cast<double>(d) * xi.apply(unit, basis);
        }
    }
    return dm;
}

ProductStateMinimum minimize_product_expectation(const ComplexMatrix& dm, int dim, int restarts,
                                                 std::uint64_t seed) {
    const Eigen::Index d = dim;
    if (dm.rows() != d * d || dm.cols() != d * d) throw DimMismatch("Choi matrix must be d^2 x d^2");

    std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> starts;
    {
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(d);
        Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d);
        a(0) = a(1) = b(0) = 1.0 / std::sqrt(2.0);
        b(1) = -1.0 / std::sqrt(2.0);
        starts.emplace_back(a, b);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    auto random_unit = [&] {
        Eigen::VectorXcd v(d);
        for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(normal(rng), normal(rng));
        return Eigen::VectorXcd(v.normalized());
    };
    for (int r = 0; r < restarts; ++r) starts.emplace_back(random_unit(), random_unit());

    ProductStateMinimum best{std::numeric_limits<double>::infinity(), {}, {}};
    for (auto [a, b] : starts) {
        double value = product_expectation(dm, a, b);
        for (int it = 0; it < 500; ++it) {
            double ignored = 0.0;
            b = lowest_eigenvector(contract_first(dm, a, d), &ignored);
            double next = 0.0;
            a = lowest_eigenvector(contract_second(dm, b, d), &next);
            const bool stalled = value - next < 1e-15;
            value = std::min(value, next);
            if (stalled) break;
        }
        value = product_expectation(dm, a, b);
        if (value < best.value) best = {value, a, b};
    }
    return best;
}

ChoiMargin choi_margins(int dim, double lambda, double gamma, int restarts, std::uint64_t seed) {
    const double closed = choi_margin_closed_form(dim, lambda, gamma);
    const auto numeric = minimize_product_expectation(scaled_choi_matrix(dim, lambda, gamma), dim, restarts, seed);
    return {closed, numeric.value};
}

double choi_positivity_margin(int dim, double lambda, double gamma) {
    const ChoiMargin m = choi_margins(dim, lambda, gamma);
    if (std::abs(m.closed_form - m.numerical) > 1e-8) {
        throw Error("Choi margin routes disagree: closed form " + std::to_string(m.closed_form) + ", numerical " +
                    std::to_string(m.numerical));
    }
    return m.closed_form;
}

double choi_positivity_margin(int dim, const VisibilityPair& pair) {
    return choi_positivity_margin(dim, pair.lambda(), pair.gamma());
}

} // namespace jointwork
