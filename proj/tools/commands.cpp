// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "problem_spec.hpp"

#include "jointwork/bloch.hpp"
#include "jointwork/choi.hpp"
#include "jointwork/errors.hpp"
#include "jointwork/feasibility.hpp"
#include "jointwork/gtpm.hpp"
#include "jointwork/parallel.hpp"
#include "jointwork/workobs.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <locale>
#include <ostream>
#include <random>
#include <sstream>

namespace jointwork::cli {

using nlohmann::ordered_json;

std::string format_number(double value, int precision) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(precision) << value;
    return os.str();
}

void write_csv(const Table& table, int precision, std::ostream& out) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            const ordered_json& cell = row[c];
            if (cell.is_number_float()) {
                out << format_number(cell.get<double>(), precision);
            } else if (cell.is_string()) {
                out << cell.get<std::string>();
            } else {
                out << cell.dump();
            }
        }
        out << '\n';
    }
}

void write_json_lines(const Table& table, std::ostream& out) {
    for (const auto& row : table.rows) {
        ordered_json record = ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c) record[table.columns[c]] = row[c];
        out << record.dump() << '\n';
    }
}

namespace {

std::uint64_t generated_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct SeedChoice {
    std::uint64_t value;
    const char* source;
};

SeedChoice choose_seed(const OutputOptions& options, std::optional<std::uint64_t> from_spec) {
    if (options.seed) return {*options.seed, "flag"};
    if (from_spec) return {*from_spec, "spec"};
    return {generated_seed(), "generated"};
}

/// Writes the machine-readable table to --output or `out`.
int emit(const Table& table, const OutputOptions& options, std::ostream& out, std::ostream& err) {
    std::ofstream file;
    std::ostream* sink = &out;
    if (options.output) {
        file.open(*options.output);
        if (!file) {
            err << "error: cannot write '" << *options.output << "'\n";
            return kExitInput;
        }
        sink = &file;
    }
    if (options.format == Format::Csv) {
        write_csv(table, options.precision, *sink);
    } else {
        write_json_lines(table, *sink);
    }
    sink->flush();
    if (!*sink) {
        err << "error: write failed\n";
        return kExitInput;
    }
    return kExitOk;
}

void write_human(const Table& table, int precision, std::ostream& out) {
    std::size_t width = 0;
    for (const auto& c : table.columns) width = std::max(width, c.size());
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << std::left << std::setw(static_cast<int>(width) + 2) << table.columns[c];
            const ordered_json& cell = row[c];
            if (cell.is_number_float()) {
                out << format_number(cell.get<double>(), precision);
            } else if (cell.is_string()) {
                out << cell.get<std::string>();
            } else {
                out << cell.dump();
            }
            out << '\n';
        }
    }
}

/// Runs `body` and maps library errors onto exit codes.
int guarded(std::ostream& err, const std::string& source, const std::function<int()>& body) {
    try {
        return body();
    } catch (const SpecError& e) {
        err << e.diagnostic(source) << '\n';
        return kExitInput;
    } catch (const AssignmentDomainError& e) {
        err << source << ": error: " << e.what() << " (visibility must exceed " << format_number(e.min_visibility(), 7)
            << ")\n";
        return kExitInadmissible;
    } catch (const SolverNonConvergence& e) {
        err << source << ": error: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const Error& e) {
        err << source << ": error: " << e.what() << '\n';
        return kExitInput;
    }
}

EnergyAssignment assignment(AssignmentKind kind, const SpectralHamiltonian& h, double visibility, double beta) {
    switch (kind) {
    case AssignmentKind::Naive:
        return naive_assignment(h);
    case AssignmentKind::CorrectedMean:
        return corrected_assignment(h, visibility);
    case AssignmentKind::Jarzynski:
        return jarzynski_assignment(h, beta, visibility);
    }
    throw InvalidArgument("unknown assignment kind");
}

struct SampleMoments {
    double mean;
    double stderr_;
};

SampleMoments moments(const CountGrid& counts, const Eigen::MatrixXd& values) {
    double n = 0.0, s = 0.0, s2 = 0.0;
    for (Eigen::Index a = 0; a < counts.rows(); ++a) {
        for (Eigen::Index b = 0; b < counts.cols(); ++b) {
            const double c = static_cast<double>(counts(a, b));
            n += c;
            s += c * values(a, b);
            s2 += c * values(a, b) * values(a, b);
        }
    }
    const double mean = s / n;
    const double var = n > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

DiagonalState spec_state(const ProblemSpec& spec) {
    if (spec.state == StateKind::Diagonal) return DiagonalState(spec.probabilities, spec.h_a);
    return DiagonalState(gibbs_state(spec.h_a, spec.beta).populations, spec.h_a);
}

} // namespace

int cmd_bounds(int d_min, int d_max, const OutputOptions& options, std::ostream& out, std::ostream& err) {
    if (d_min < 2 || d_max > 64 || d_min > d_max) {
        err << "error: need 2 <= d_min <= d_max <= 64 (got " << d_min << ", " << d_max << ")\n";
        return kExitInput;
    }
    Table table{{"d", "lambda_sym", "lambda_opt", "lambda_mub_corrected", "lambda_mub_printed"}, {}};
    for (int d = d_min; d <= d_max; ++d) {
        const ReferenceVisibilities corrected = reference_visibilities(d, MubFormula::Corrected);
        const ReferenceVisibilities printed = reference_visibilities(d, MubFormula::Printed);
        table.rows.push_back({d, symmetric_critical_visibility(d), corrected.lambda_opt, corrected.lambda_mub,
                              printed.lambda_mub});
    }
    return emit(table, options, out, err);
}

int cmd_run(const std::string& spec_path, const OutputOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, spec_path, [&] {
        const ProblemSpec spec = load_problem_spec(spec_path);
        const SeedChoice seed = choose_seed(options, spec.seed);
        const int d = spec.dimension;

        const double bound = gamma_bound(d, spec.lambda);
        const bool admissible = spec.gamma <= bound;
        if (!admissible && !options.force) {
            err << spec_path << ": error: gamma = " << format_number(spec.gamma, 10) << " exceeds the bound "
                << format_number(bound, 10) << " for lambda = " << format_number(spec.lambda, 10)
                << " (use --force to evaluate anyway)\n";
            return int{kExitInadmissible};
        }

        const JointWorkObservable w(spec.h_a, spec.h_b, spec.unitary, VisibilityPair(spec.lambda, spec.gamma));
        const Povm& b_povm = w.second().povm();
        const DiagonalState state = spec_state(spec);
        const GibbsState gibbs = gibbs_state(spec.h_a, spec.beta);

        const double marginal_residual = check_marginals(w.effects(), w.first().povm(), w.second_heisenberg());

        // Average work with the mean-corrected assignments.
        const EnergyAssignment f_c = corrected_assignment(spec.h_a, spec.lambda);
        const EnergyAssignment g_c = corrected_assignment(spec.h_b, spec.gamma);
        const ComplexMatrix& u = spec.unitary;
        const ComplexMatrix& rho = state.rho().matrix();
        const double exact_work =
            trace_product(spec.h_b.matrix().matrix(), u * rho * u.adjoint()) - trace_product(spec.h_a.matrix().matrix(), rho);
        const double joint_work = work_distribution(w, state.rho(), f_c, g_c).mean_work();
        const CountGrid work_counts =
            sample_gtpm(state.rho(), w.instrument(), u, b_povm, spec.samples, derive_seed(seed.value, 0));
        const SampleMoments sampled_work = moments(work_counts, w.work_values(f_c, g_c));

        const double fluctuation = fluctuation_residual(w, w.instrument(), u, b_povm, state);

        // Jarzynski estimator on the Gibbs state of H_A.
        const EnergyAssignment f = assignment(spec.f, spec.h_a, spec.lambda, spec.beta);
        const EnergyAssignment g = assignment(spec.g, spec.h_b, spec.gamma, spec.beta);
        const double sum = jarzynski_sum(work_distribution(w, gibbs.rho, f, g), spec.beta);
        const double target = partition_ratio(spec.h_a, spec.h_b, spec.beta);
        const CountGrid jar_counts =
            sample_gtpm(gibbs.rho, w.instrument(), u, b_povm, spec.samples, derive_seed(seed.value, 1));
        const SampleMoments sampled_sum =
            moments(jar_counts, (-spec.beta * w.work_values(f, g).array()).exp().matrix());

        const PositivityAudit& audit = w.audit();
        Table table{{"seed",
                     "seed_source",
                     "dimension",
                     "lambda",
                     "gamma",
                     "beta",
                     "samples",
                     "gamma_bound",
                     "admissible",
                     "min_effect_eigenvalue",
                     "witness_a",
                     "witness_b",
                     "marginal_residual",
                     "average_work_exact",
                     "average_work_joint",
                     "average_work_sampled",
                     "average_work_sampled_stderr",
                     "fluctuation_residual",
                     "f",
                     "g",
                     "jarzynski_sum",
                     "jarzynski_sum_sampled",
                     "jarzynski_sum_sampled_stderr",
                     "partition_ratio",
                     "free_energy_difference"},
                    {}};
        table.rows.push_back({seed.value,
                              seed.source,
                              d,
                              spec.lambda,
                              spec.gamma,
                              spec.beta,
                              spec.samples,
                              bound,
                              admissible,
                              audit.min_eigenvalue,
                              audit.witness_a,
                              audit.witness_b,
                              marginal_residual,
                              exact_work,
                              joint_work,
                              sampled_work.mean,
                              sampled_work.stderr_,
                              fluctuation,
                              std::string(to_string(spec.f)),
                              std::string(to_string(spec.g)),
                              sum,
                              sampled_sum.mean,
                              sampled_sum.stderr_,
                              target,
                              free_energy_difference(spec.h_a, spec.h_b, spec.beta) + 0.0});

        if (options.output) write_human(table, options.precision, out);
        return emit(table, options, out, err);
    });
}

int cmd_sample(const std::string& spec_path, std::optional<std::uint64_t> samples, const OutputOptions& options,
               std::ostream& out, std::ostream& err) {
    return guarded(err, spec_path, [&] {
        const ProblemSpec spec = load_problem_spec(spec_path);
        const SeedChoice seed = choose_seed(options, spec.seed);
        const std::uint64_t n = samples.value_or(spec.samples);
        if (n == 0) throw SpecError("sample count must be at least 1", 0, 0);

        const NoisyEnergyPovm first(spec.h_a, spec.lambda);
        const NoisyEnergyPovm second(spec.h_b, spec.gamma);
        const LuedersInstrument instrument(first);
        const DiagonalState state = spec_state(spec);
        const CountGrid counts = sample_gtpm(state.rho(), instrument, spec.unitary, second.povm(), n, seed.value);
        const ProbabilityGrid exact = gtpm_distribution(state.rho(), instrument, spec.unitary, second.povm());

        Table table{{"seed", "a", "b", "count", "frequency", "probability"}, {}};
        for (Eigen::Index a = 0; a < counts.rows(); ++a) {
            for (Eigen::Index b = 0; b < counts.cols(); ++b) {
                table.rows.push_back({seed.value, a, b, counts(a, b),
                                      static_cast<double>(counts(a, b)) / static_cast<double>(n), exact(a, b)});
            }
        }
        return emit(table, options, out, err);
    });
}

namespace {

struct Instance {
    SpectralHamiltonian h_a;
    SpectralHamiltonian h_b;
    ComplexMatrix u;
    double lambda;
    double gamma;
    double beta;
    Hermitian rho;        // generic density matrix
    RealVector diagonal;  // populations in the H_A basis
    RealVector f;         // arbitrary assignments
    RealVector g;
};

RealVector random_energies(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> gap(0.1, 1.1);
    RealVector e(d);
    e(0) = gap(rng) - 0.6;
    for (int i = 1; i < d; ++i) e(i) = e(i - 1) + gap(rng);
    return e;
}

Instance random_instance(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal;
    SpectralHamiltonian h_a(random_energies(d, rng), haar_random_unitary(d, rng()));
    SpectralHamiltonian h_b(random_energies(d, rng), haar_random_unitary(d, rng()));
    const ComplexMatrix u = haar_random_unitary(d, rng());
    const double lambda = 0.05 + 0.9 * unit(rng);
    const double gamma = gamma_bound(d, lambda) * (0.05 + 0.95 * unit(rng));
    const double beta = 0.2 + 1.8 * unit(rng);
    ComplexMatrix z(d, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Complex(normal(rng), normal(rng));
    ComplexMatrix rho = z * z.adjoint();
    rho /= rho.trace().real();
    RealVector p(d);
    for (int i = 0; i < d; ++i) p(i) = unit(rng) + 1e-3;
    p /= p.sum();
    RealVector f(d), g(d);
    for (int i = 0; i < d; ++i) f(i) = normal(rng), g(i) = normal(rng);
    return {std::move(h_a), std::move(h_b), u, lambda, std::min(gamma, 0.999), beta, Hermitian::projected(rho), p, f, g};
}

struct Check {
    const char* name;
    double tolerance;
    std::function<double(const Instance&, int)> residual;
};

std::vector<Check> checks() {
    return {
        {"spectral_reconstruction", 1e-10,
         [](const Instance& in, int) {
             ComplexMatrix sum = ComplexMatrix::Zero(in.h_a.dim(), in.h_a.dim());
             for (Eigen::Index a = 0; a < in.h_a.dim(); ++a) {
                 sum += in.h_a.energies()(a) * in.h_a.projector(static_cast<std::size_t>(a));
             }
             return max_abs(sum - in.h_a.matrix().matrix());
         }},
        {"bloch_round_trip", 1e-12,
         [](const Instance& in, int) {
             const GellMannBasis basis = build_basis(in.h_a.frame());
             return max_abs(from_bloch(to_bloch(in.rho, basis), basis).matrix() - in.rho.matrix());
         }},
        {"instrument_inverse", 1e-9,
         [](const Instance& in, int) {
             const LuedersInstrument instrument(NoisyEnergyPovm(in.h_a, in.lambda));
             return max_abs(inverse_instrument_channel(instrument, instrument_channel(instrument, in.rho)).matrix() -
                            in.rho.matrix());
         }},
        {"marginals", 1e-10,
         [](const Instance& in, int) {
             const JointWorkObservable w(in.h_a, in.h_b, in.u, VisibilityPair(in.lambda, in.gamma));
             return check_marginals(w.effects(), w.first().povm(), w.second_heisenberg());
         }},
        {"positivity", 1e-9,
         [](const Instance& in, int) {
             const JointWorkObservable w(in.h_a, in.h_b, in.u, VisibilityPair(in.lambda, in.gamma));
             return std::max(0.0, -w.audit().min_eigenvalue);
         }},
        {"average_condition", 1e-10,
         [](const Instance& in, int) {
             const JointWorkObservable w(in.h_a, in.h_b, in.u, VisibilityPair(in.lambda, in.gamma));
             const EnergyAssignment f{AssignmentKind::Naive, in.f};
             const EnergyAssignment g{AssignmentKind::Naive, in.g};
             const Hermitian expected =
                 average_operator(w.second_heisenberg(), g) - average_operator(w.first().povm(), f);
             return max_abs(work_average_operator(w, f, g).matrix() - expected.matrix());
         }},
        {"average_work", 1e-10,
         [](const Instance& in, int) {
             const JointWorkObservable w(in.h_a, in.h_b, in.u, VisibilityPair(in.lambda, in.gamma));
             const double mean = work_distribution(w, in.rho, corrected_assignment(in.h_a, in.lambda),
                                                   corrected_assignment(in.h_b, in.gamma))
                                     .mean_work();
             const ComplexMatrix& rho = in.rho.matrix();
             const double exact = trace_product(in.h_b.matrix().matrix(), in.u * rho * in.u.adjoint()) -
                                  trace_product(in.h_a.matrix().matrix(), rho);
             return std::abs(mean - exact);
         }},
        {"fluctuation", 1e-10,
         [](const Instance& in, int) {
             const JointWorkObservable w(in.h_a, in.h_b, in.u, VisibilityPair(in.lambda, in.gamma));
             return fluctuation_residual(w, w.instrument(), in.u, w.second().povm(), DiagonalState(in.diagonal, in.h_a));
         }},
        {"jarzynski_exact", 1e-9,
         [](const Instance& in, int d) {
             const double lambda = 0.5 * (1.0 + std::max(jarzynski_min_visibility(in.h_a, in.beta), 0.0));
             const double gamma = 0.9 * gamma_bound(d, lambda);
             const JointWorkObservable w(in.h_a, in.h_b, in.u, VisibilityPair(lambda, gamma));
             const GibbsState gibbs = gibbs_state(in.h_a, in.beta);
             const double sum = jarzynski_sum(
                 work_distribution(w, gibbs.rho, jarzynski_assignment(in.h_a, in.beta, lambda), naive_assignment(in.h_b)),
                 in.beta);
             const double target = partition_ratio(in.h_a, in.h_b, in.beta);
             return std::abs(sum - target) / target;
         }},
        {"choi_consistency", 1e-8,
         [](const Instance& in, int d) {
             const ChoiMargin m = choi_margins(d, std::min(in.lambda, 0.95), in.gamma);
             return std::abs(m.closed_form - m.numerical);
         }},
    };
}

} // namespace

int cmd_verify(std::size_t cases, int d_min, int d_max, const OutputOptions& options, std::ostream& out,
               std::ostream& err) {
    if (cases == 0 || d_min < 2 || d_max > 16 || d_min > d_max) {
        err << "error: need cases >= 1 and 2 <= d_min <= d_max <= 16\n";
        return kExitInput;
    }
    return guarded(err, "verify", [&] {
        const SeedChoice seed = choose_seed(options, std::nullopt);
        const std::vector<Check> suite = checks();
        const std::size_t dims = static_cast<std::size_t>(d_max - d_min + 1);
        // residuals[(dim_index * cases + case) * suite.size() + check]
        std::vector<double> residuals(dims * cases * suite.size(), 0.0);
        parallel_for(dims * cases, worker_threads(), [&](std::size_t cell) {
            const int d = d_min + static_cast<int>(cell / cases);
            const Instance in = random_instance(d, derive_seed(seed.value, cell));
            for (std::size_t c = 0; c < suite.size(); ++c) residuals[cell * suite.size() + c] = suite[c].residual(in, d);
        });

        Table table{{"seed", "check", "dimension", "cases", "max_residual", "tolerance", "pass"}, {}};
        bool all = true;
        for (std::size_t di = 0; di < dims; ++di) {
            for (std::size_t c = 0; c < suite.size(); ++c) {
                double worst = 0.0;
                for (std::size_t k = 0; k < cases; ++k) {
                    worst = std::max(worst, residuals[((di * cases) + k) * suite.size() + c]);
                }
                const bool pass = worst <= suite[c].tolerance;
                all = all && pass;
                table.rows.push_back({seed.value, suite[c].name, d_min + static_cast<int>(di), cases, worst,
                                      suite[c].tolerance, pass});
            }
        }
        const int status = emit(table, options, out, err);
        if (status != kExitOk) return status;
        if (!all) err << "verify: one or more invariant checks failed\n";
        return all ? int{kExitOk} : int{kExitCheckFailed};
    });
}

int cmd_feasibility(int dim, std::size_t unitaries, double tol, double resolution, const OutputOptions& options,
                    std::ostream& out, std::ostream& err) {
    if (dim < 2 || dim > 8 || unitaries == 0 || !(tol > 0.0) || !(resolution > 0.0 && resolution < 0.5)) {
        err << "error: need 2 <= dim <= 8, unitaries >= 1, tol > 0 and 0 < resolution < 0.5\n";
        return kExitInput;
    }
    return guarded(err, "feasibility", [&] {
        const SeedChoice seed = choose_seed(options, std::nullopt);
        CriticalVisibilityOptions opts;
        opts.resolution = resolution;
        const double estimate = estimate_critical_visibility(dim, unitaries, tol, seed.value, opts);
        const double analytic = symmetric_critical_visibility(dim);
        Table table{{"seed", "d", "unitaries", "tol", "lambda_estimate", "lambda_sym", "difference"}, {}};
        table.rows.push_back({seed.value, dim, unitaries, tol, estimate, analytic, estimate - analytic});
        return emit(table, options, out, err);
    });
}

} // namespace jointwork::cli
