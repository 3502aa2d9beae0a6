// SPDX-License-Identifier: Apache-2.0
#include "jointwork/feasibility.hpp"

#include "jointwork/bloch.hpp"
#include "jointwork/errors.hpp"
#include "jointwork/parallel.hpp"
#include "jointwork/workobs.hpp"

#include <cmath>
#include <deque>
#include <mutex>
#include <numeric>
#include <string>

namespace jointwork {

FeasibilityProblem::FeasibilityProblem(Povm first, Povm second_heisenberg, SpectralHamiltonian probes)
    : first_(std::move(first)),
      second_(std::move(second_heisenberg)),
      probes_(std::move(probes)),
      targets_(first_.size(), second_.size(), first_.dim()) {
    if (second_.dim() != first_.dim() || probes_.dim() != first_.dim()) {
        throw DimMismatch("feasibility problem operands have different dimensions");
    }
    for (std::size_t a = 0; a < first_.size(); ++a) {
        const ComplexMatrix r = matrix_sqrt_psd(first_.effect(a)).matrix();
        for (std::size_t b = 0; b < second_.size(); ++b) {
            targets_(a, b) = Hermitian::projected(r * second_.effect(b).matrix() * r).matrix();
        }
    }
}

double FeasibilityProblem::objective(const EffectGrid& k) const {
    if (k.rows() != targets_.rows() || k.cols() != targets_.cols()) throw ShapeMismatch("grid shape");
    double total = 0.0;
    for (std::size_t a = 0; a < k.rows(); ++a) {
        for (std::size_t b = 0; b < k.cols(); ++b) {
            const ComplexMatrix diff = k(a, b) - targets_(a, b);
            for (const auto& p : probes_.projectors()) total += std::abs(trace_product(diff, p));
        }
    }
    return total;
}

FeasibilityProblem make_feasibility_problem(const SpectralHamiltonian& h_a, const SpectralHamiltonian& h_b,
                                            const ComplexMatrix& u, double lambda, double gamma) {
    return FeasibilityProblem(noisy_effects(h_a, lambda).povm(),
                              heisenberg_povm(noisy_effects(h_b, gamma).povm(), u), h_a);
}

std::string_view to_string(FeasibilityStatus status) {
    switch (status) {
    case FeasibilityStatus::FeasibleZeroObjective: return "feasible_zero_objective";
    case FeasibilityStatus::FeasiblePositiveObjective: return "feasible_positive_objective";
    case FeasibilityStatus::Infeasible: return "infeasible";
    case FeasibilityStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

namespace {

// Real coordinates of the Hermitian cells in the probe frame. Each d×d cell
// occupies d² slots: the d diagonal entries first, then √2·Re and √2·Im of
// every upper off-diagonal entry, so the Euclidean norm is the Frobenius norm.
class CellSpace {
public:
    CellSpace(std::size_t rows, std::size_t cols, Eigen::Index dim)
        : rows_(rows), cols_(cols), dim_(dim), width_(dim * dim) {}

    std::size_t cells() const { return rows_ * cols_; }
    Eigen::Index width() const { return width_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(cells()) * width_; }
    Eigen::Index offset(std::size_t a, std::size_t b) const {
        return static_cast<Eigen::Index>(a * cols_ + b) * width_;
    }

    void pack(const ComplexMatrix& m, Eigen::Ref<RealVector> out) const {
        const double s = std::sqrt(2.0);
        Eigen::Index q = dim_;
        for (Eigen::Index i = 0; i < dim_; ++i) out(i) = m(i, i).real();
        for (Eigen::Index i = 0; i < dim_; ++i) {
            for (Eigen::Index j = i + 1; j < dim_; ++j) {
                const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
                out(q++) = s * v.real();
                out(q++) = s * v.imag();
            }
        }
    }

    ComplexMatrix unpack(const Eigen::Ref<const RealVector>& in) const {
        const double s = 1.0 / std::sqrt(2.0);
        ComplexMatrix m(dim_, dim_);
        Eigen::Index q = dim_;
        for (Eigen::Index i = 0; i < dim_; ++i) m(i, i) = in(i);
        for (Eigen::Index i = 0; i < dim_; ++i) {
            for (Eigen::Index j = i + 1; j < dim_; ++j) {
                const Complex v(s * in(q), s * in(q + 1));
                q += 2;
                m(i, j) = v;
                m(j, i) = std::conj(v);
            }
        }
        return m;
    }

    RealVector pack_grid(const EffectGrid& g, const ComplexMatrix& frame) const {
        RealVector x(size());
        for (std::size_t a = 0; a < rows_; ++a) {
            for (std::size_t b = 0; b < cols_; ++b) {
                pack(frame.adjoint() * g(a, b) * frame, x.segment(offset(a, b), width_));
            }
        }
        return x;
    }

    EffectGrid unpack_grid(const RealVector& x, const ComplexMatrix& frame) const {
        EffectGrid g(rows_, cols_, dim_);
        for (std::size_t a = 0; a < rows_; ++a) {
            for (std::size_t b = 0; b < cols_; ++b) {
                g(a, b) = frame * unpack(x.segment(offset(a, b), width_)) * frame.adjoint();
            }
        }
        return g;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Eigen::Index dim() const { return dim_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    Eigen::Index dim_;
    Eigen::Index width_;
};

class Solver {
public:
    Solver(const FeasibilityProblem& p, const SolverOptions& opt)
        : problem_(p),
          options_(opt),
          space_(p.first().size(), p.second().size(), p.dim()),
          frame_(p.probes().frame()) {
        const Eigen::Index w = space_.width();
        row_targets_ = Eigen::MatrixXd(static_cast<Eigen::Index>(space_.rows()), w);
        col_targets_ = Eigen::MatrixXd(static_cast<Eigen::Index>(space_.cols()), w);
        RealVector tmp(w);
        for (std::size_t a = 0; a < space_.rows(); ++a) {
            space_.pack(frame_.adjoint() * p.first().effect(a).matrix() * frame_, tmp);
            row_targets_.row(static_cast<Eigen::Index>(a)) = tmp.transpose();
        }
        for (std::size_t b = 0; b < space_.cols(); ++b) {
            space_.pack(frame_.adjoint() * p.second().effect(b).matrix() * frame_, tmp);
            col_targets_.row(static_cast<Eigen::Index>(b)) = tmp.transpose();
        }
        diag_targets_ = RealVector(static_cast<Eigen::Index>(space_.cells()) * space_.dim());
        const RealVector t = space_.pack_grid(p.targets(), frame_);
        for (std::size_t c = 0; c < space_.cells(); ++c) {
            diag_targets_.segment(static_cast<Eigen::Index>(c) * space_.dim(), space_.dim()) =
                t.segment(static_cast<Eigen::Index>(c) * space_.width(), space_.dim());
        }
    }

    FeasibilityResult run(const EffectGrid* warm_start) {
        if (warm_start && (warm_start->rows() != space_.rows() || warm_start->cols() != space_.cols() ||
                           warm_start->dim() != space_.dim())) {
            throw ShapeMismatch("warm start grid shape");
        }
        RealVector z = warm_start ? space_.pack_grid(*warm_start, frame_) : space_.pack_grid(problem_.targets(), frame_);

        // Phase 1: alternating projections onto the marginal set and the cone.
        RealVector x(space_.size());
        std::size_t stalled = 0;
        std::deque<double> window;
        for (;;) {
            x = project_affine(z);
            z = project_psd(x);
            const double gap = (x - z).norm();
            result_.gap_trace.push_back(gap);
            ++iterations_;
            if (gap <= 0.1 * options_.tol) break;
            window.push_back(gap);
            if (window.size() > options_.infeasible_window) window.pop_front();
            const bool flat = window.size() == options_.infeasible_window &&
                              window.front() - window.back() <= 1e-3 * window.back();
            stalled = (gap > 10.0 * options_.tol && flat) ? stalled + 1 : 0;
            if (stalled > 0) return finish(FeasibilityStatus::Infeasible, x);
            if (iterations_ >= options_.max_iter) return finish(FeasibilityStatus::MaxIterations, x);
        }
        if (is_zero_certificate(x)) return finish(FeasibilityStatus::FeasibleZeroObjective, x);

        // Phase 2: ADMM on  min ‖L x − t‖₁  s.t. x ∈ affine, z ∈ PSD, x = z.
        const Eigen::Index nd = diag_targets_.size();
        RealVector u = RealVector::Zero(space_.size());
        RealVector s = select_diag(z) - diag_targets_;
        RealVector v = RealVector::Zero(nd);
        double rho = 1.0;
        const double eps = 0.1 * options_.tol;
        for (std::size_t k = 0;; ++k) {
            // x-update: the quadratic is uniform within every coordinate class,
            // so the weighted least-squares step is a projection of the average.
            RealVector target = z - u;
            const RealVector diag_goal = diag_targets_ + s - v;
            for (std::size_t c = 0; c < space_.cells(); ++c) {
                const Eigen::Index off = static_cast<Eigen::Index>(c) * space_.width();
                const Eigen::Index doff = static_cast<Eigen::Index>(c) * space_.dim();
                target.segment(off, space_.dim()) =
                    0.5 * (target.segment(off, space_.dim()) + diag_goal.segment(doff, space_.dim()));
            }
            x = project_affine(target);

            const RealVector z_prev = z;
            const RealVector s_prev = s;
            z = project_psd(x + u);
            const RealVector lx = select_diag(x) - diag_targets_;
            s = soft_threshold(lx + v, 1.0 / rho);
            u += x - z;
            v += lx - s;
            ++iterations_;

            const double primal = std::sqrt((x - z).squaredNorm() + (lx - s).squaredNorm());
            RealVector dz = z - z_prev;
            const RealVector ds = s - s_prev;
            for (std::size_t c = 0; c < space_.cells(); ++c) {
                dz.segment(static_cast<Eigen::Index>(c) * space_.width(), space_.dim()) +=
                    ds.segment(static_cast<Eigen::Index>(c) * space_.dim(), space_.dim());
            }
            const double dual = rho * dz.norm();

            if (k % 10 == 0 && primal <= options_.tol && is_zero_certificate(x)) {
                return finish(FeasibilityStatus::FeasibleZeroObjective, x);
            }
            if (primal <= eps && dual <= eps) {
                return finish(is_zero_certificate(x) ? FeasibilityStatus::FeasibleZeroObjective
                                                     : FeasibilityStatus::FeasiblePositiveObjective,
                              x);
            }
            if (iterations_ >= options_.max_iter) return finish(FeasibilityStatus::MaxIterations, x);

            if (k % 25 == 24) {
                if (primal > 10.0 * dual) {
                    rho *= 2.0;
                    u /= 2.0;
                    v /= 2.0;
                } else if (dual > 10.0 * primal) {
                    rho /= 2.0;
                    u *= 2.0;
                    v *= 2.0;
                }
            }
        }
    }

private:
    // Row sums and column sums are prescribed independently for every real
    // coordinate, so the projection splits into |A|×|B| transport-style
    // corrections, one per coordinate.
    RealVector project_affine(const RealVector& y) const {
        const auto m = static_cast<Eigen::Index>(space_.rows());
        const auto n = static_cast<Eigen::Index>(space_.cols());
        RealVector out = y;
        Eigen::MatrixXd grid(m, n);
        for (Eigen::Index q = 0; q < space_.width(); ++q) {
            for (Eigen::Index a = 0; a < m; ++a) {
                for (Eigen::Index b = 0; b < n; ++b) {
                    grid(a, b) = y(space_.offset(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) + q);
                }
            }
            const RealVector row_res = row_targets_.col(q) - grid.rowwise().sum();
            const RealVector col_res = col_targets_.col(q) - grid.colwise().sum().transpose();
            const double total = 0.5 * (row_res.sum() + col_res.sum());
            for (Eigen::Index a = 0; a < m; ++a) {
                for (Eigen::Index b = 0; b < n; ++b) {
                    out(space_.offset(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) + q) +=
                        row_res(a) / static_cast<double>(n) + col_res(b) / static_cast<double>(m) -
                        total / static_cast<double>(m * n);
                }
            }
        }
        return out;
    }

    RealVector project_psd(const RealVector& y) const {
        RealVector out(y.size());
        for (std::size_t c = 0; c < space_.cells(); ++c) {
            const Eigen::Index off = static_cast<Eigen::Index>(c) * space_.width();
            const ComplexMatrix m = space_.unpack(y.segment(off, space_.width()));
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
            const RealVector ev = es.eigenvalues().cwiseMax(0.0);
            const ComplexMatrix& vecs = es.eigenvectors();
            space_.pack(vecs * ev.cast<Complex>().asDiagonal() * vecs.adjoint(), out.segment(off, space_.width()));
        }
        return out;
    }

    RealVector select_diag(const RealVector& y) const {
        RealVector out(diag_targets_.size());
        for (std::size_t c = 0; c < space_.cells(); ++c) {
            out.segment(static_cast<Eigen::Index>(c) * space_.dim(), space_.dim()) =
                y.segment(static_cast<Eigen::Index>(c) * space_.width(), space_.dim());
        }
        return out;
    }

    static RealVector soft_threshold(const RealVector& y, double t) {
        return y.unaryExpr([t](double v) { return v > t ? v - t : (v < -t ? v + t : 0.0); });
    }

    double min_cell_eigenvalue(const RealVector& y) const {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < space_.cells(); ++c) {
            const ComplexMatrix m = space_.unpack(y.segment(static_cast<Eigen::Index>(c) * space_.width(), space_.width()));
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
            lo = std::min(lo, es.eigenvalues()(0));
        }
        return lo;
    }

    bool is_zero_certificate(const RealVector& x) const {
        return (select_diag(x) - diag_targets_).lpNorm<1>() <= options_.tol &&
               min_cell_eigenvalue(x) >= -options_.tol;
    }

    FeasibilityResult finish(FeasibilityStatus status, const RealVector& x) {
        result_.status = status;
        result_.grid = space_.unpack_grid(x, frame_);
        result_.objective = problem_.objective(result_.grid);
        result_.marginal_residual = check_marginals(result_.grid, problem_.first(), problem_.second());
        result_.min_eigenvalue = result_.grid.min_eigenvalue();
        result_.iterations = iterations_;
        return std::move(result_);
    }

    const FeasibilityProblem& problem_;
    SolverOptions options_;
    CellSpace space_;
    ComplexMatrix frame_;
    Eigen::MatrixXd row_targets_;
    Eigen::MatrixXd col_targets_;
    RealVector diag_targets_;
    std::size_t iterations_ = 0;
    FeasibilityResult result_;
};

} // namespace

FeasibilityResult solve_joint_feasibility(const FeasibilityProblem& problem, const SolverOptions& options,
                                          const EffectGrid* warm_start) {
    if (!(options.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (options.max_iter == 0) throw InvalidArgument("max_iter must be positive");
    return Solver(problem, options).run(warm_start);
}

FeasibilityResult solve_joint_feasibility(const FeasibilityProblem& problem, double tol, std::size_t max_iter,
                                          const EffectGrid* warm_start) {
    SolverOptions options;
    options.tol = tol;
    options.max_iter = max_iter;
    return solve_joint_feasibility(problem, options, warm_start);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double estimate_critical_visibility(int dim, std::size_t n_unitaries, double tol, std::uint64_t seed,
                                    const CriticalVisibilityOptions& options) {
    if (n_unitaries == 0) throw InvalidArgument("need at least one unitary");
    if (dim < 2) throw InvalidArgument("dimension must be at least 2");
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");

    RealVector levels(dim);
    for (int k = 0; k < dim; ++k) levels(k) = k;
    const SpectralHamiltonian h = SpectralHamiltonian::diagonal(levels);
    std::vector<ComplexMatrix> unitaries;
    unitaries.reserve(n_unitaries);
    for (std::size_t i = 0; i < n_unitaries; ++i) unitaries.push_back(haar_random_unitary(dim, derive_seed(seed, i)));

    const unsigned threads = options.threads > 0 ? options.threads : worker_threads();
    SolverOptions solver;
    solver.tol = tol;
    solver.max_iter = options.max_iter;

    // Unitaries that failed before are tried first; a single failure decides.
    std::vector<std::size_t> order(n_unitaries);
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto passes = [&](double visibility) {
        std::vector<int> verdict(n_unitaries, 1);
        std::atomic<bool> failed{false};
        parallel_for(n_unitaries, threads, [&](std::size_t slot) {
            if (failed) return;
            const std::size_t i = order[slot];
            const FeasibilityProblem problem = make_feasibility_problem(h, h, unitaries[i], visibility, visibility);
            const JointWorkObservable witness(h, h, unitaries[i], VisibilityPair(visibility, visibility));
            const FeasibilityResult r = solve_joint_feasibility(problem, solver, &witness.effects());
            if (r.status == FeasibilityStatus::MaxIterations) {
                throw SolverNonConvergence("visibility " + std::to_string(visibility) + ", unitary " +
                                           std::to_string(i) + ": objective " + std::to_string(r.objective) +
                                           " after " + std::to_string(r.iterations) + " iterations");
            }
            if (r.status != FeasibilityStatus::FeasibleZeroObjective) {
                verdict[slot] = 0;
                failed = true;
            }
        });
        for (std::size_t slot = 0; slot < n_unitaries; ++slot) {
            if (!verdict[slot]) {
                std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(slot),
                            order.begin() + static_cast<std::ptrdiff_t>(slot) + 1);
                return false;
            }
        }
        return true;
    };

    // λ = 0 is always compatible; λ = 1 is the projective no-go.
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > options.resolution) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

} // namespace jointwork
