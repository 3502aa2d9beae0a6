// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace jointwork::cli;

int main(int argc, char** argv) {
    CLI::App app{"Joint work observables for unsharp two-point energy measurements"};
    app.require_subcommand(1);
    app.fallthrough();

    OutputOptions options;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string output;
    app.add_option("--seed", seed, "Random seed (recorded in every report)");
    app.add_option("--precision", options.precision, "Significant digits in CSV output")
        ->check(CLI::Range(1, 15))
        ->capture_default_str();
    app.add_flag("--force", options.force, "Evaluate visibilities outside the admissible region");
    app.add_option("--output", output, "Write machine-readable output to this file");
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json-lines"}))
        ->capture_default_str();

    int d_min = 2, d_max = 10;
    CLI::App* bounds = app.add_subcommand("bounds", "Critical visibility table");
    bounds->add_option("--d-min", d_min)->capture_default_str();
    bounds->add_option("--d-max", d_max)->capture_default_str();

    std::string spec_path;
    CLI::App* run = app.add_subcommand("run", "Evaluate a problem file");
    run->add_option("spec", spec_path, "Problem file")->required();

    std::uint64_t samples = 0;
    CLI::App* sample = app.add_subcommand("sample", "Monte Carlo histogram of the sequential protocol");
    sample->add_option("spec", spec_path, "Problem file")->required();
    CLI::Option* samples_opt = sample->add_option("--samples", samples, "Override the sample count");

    std::size_t cases = 20;
    int verify_min = 2, verify_max = 5;
    CLI::App* verify = app.add_subcommand("verify", "Invariant suites over random instances");
    verify->add_option("--cases", cases)->capture_default_str();
    verify->add_option("--d-min", verify_min)->capture_default_str();
    verify->add_option("--d-max", verify_max)->capture_default_str();

    int dim = 2;
    std::size_t unitaries = 50;
    double tol = 1e-7, resolution = 1e-3;
    CLI::App* feasibility = app.add_subcommand("feasibility", "Numerical critical visibility");
    feasibility->add_option("--dim", dim)->capture_default_str();
    feasibility->add_option("--unitaries", unitaries)->capture_default_str();
    feasibility->add_option("--tol", tol)->capture_default_str();
    feasibility->add_option("--resolution", resolution)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    if (app.count("--seed")) options.seed = seed;
    if (!output.empty()) options.output = output;
    options.format = format == "json-lines" ? Format::JsonLines : Format::Csv;

    if (*bounds) return cmd_bounds(d_min, d_max, options, std::cout, std::cerr);
    if (*run) return cmd_run(spec_path, options, std::cout, std::cerr);
    if (*sample) {
        return cmd_sample(spec_path, samples_opt->count() ? std::optional(samples) : std::nullopt, options, std::cout,
                          std::cerr);
    }
    if (*verify) return cmd_verify(cases, verify_min, verify_max, options, std::cout, std::cerr);
    return cmd_feasibility(dim, unitaries, tol, resolution, options, std::cout, std::cerr);
}
