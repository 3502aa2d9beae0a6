// SPDX-License-Identifier: Apache-2.0
#include "../tools/commands.hpp"
#include "../tools/problem_spec.hpp"

#include "jointwork/errors.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

using namespace jointwork::cli;
using nlohmann::json;

namespace {

const std::string kFixtures = FIXTURE_DIR;

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

struct Captured {
    int code;
    std::string out;
    std::string err;
};

template <class F>
Captured capture(F&& f) {
    std::ostringstream out, err;
    const int code = f(out, err);
    return {code, out.str(), err.str()};
}

// Runs the installed binary; stderr is discarded.
Captured tool(const std::string& args) {
    const std::string cmd = std::string(TOOL_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, {}};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
    return out;
}

std::map<std::string, std::string> csv_row(const std::string& text, std::size_t row = 0) {
    const auto ls = lines(text);
    REQUIRE(ls.size() >= row + 2);
    const auto head = split(ls[0]), cells = split(ls[row + 1]);
    REQUIRE(head.size() == cells.size());
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < head.size(); ++i) out[head[i]] = cells[i];
    return out;
}

json run_json(const std::string& spec, OutputOptions opts = {}) {
    opts.format = Format::JsonLines;
    const Captured c = capture([&](std::ostream& o, std::ostream& e) { return cmd_run(spec, opts, o, e); });
    REQUIRE(c.code == kExitOk);
    return json::parse(c.out);
}

} // namespace

TEST_CASE("bounds table") {
    OutputOptions opts;
    const Captured c = capture([&](std::ostream& o, std::ostream& e) { return cmd_bounds(2, 10, opts, o, e); });
    REQUIRE(c.code == kExitOk);
    const auto ls = lines(c.out);
    REQUIRE(ls.size() == 10);
    CHECK(ls[0] == "d,lambda_sym,lambda_opt,lambda_mub_corrected,lambda_mub_printed");
    CHECK(ls[1] == "2,0.7071068,0.7071068,0.7071068,0.2071068");
    CHECK(csv_row(c.out, 1)["lambda_opt"] == "0.6403882");
    CHECK(csv_row(c.out, 1)["lambda_sym"] == "0.6381403");
    for (std::size_t r = 0; r < 9; ++r) {
        const auto row = csv_row(c.out, r);
        CHECK(std::stod(row.at("lambda_sym")) <= std::stod(row.at("lambda_opt")) + 1e-7);
    }
}

TEST_CASE("bounds rejects an invalid range") {
    const Captured c = capture([](std::ostream& o, std::ostream& e) { return cmd_bounds(5, 3, {}, o, e); });
    CHECK(c.code == kExitInput);
    CHECK(c.out.empty());
    CHECK(c.err.find("error") != std::string::npos);
    CHECK(tool("bounds --d-min 1").code == kExitInput);
}

TEST_CASE("precision controls csv digits") {
    OutputOptions opts;
    opts.precision = 3;
    const Captured c = capture([&](std::ostream& o, std::ostream& e) { return cmd_bounds(2, 2, opts, o, e); });
    CHECK(lines(c.out)[1] == "2,0.707,0.707,0.707,0.207");
    CHECK(format_number(0.1863337, 4) == "0.1863");
}

TEST_CASE("qubit reference run") {
    const json row = run_json(fixture("qubit_reference.yaml"));
    CHECK(row["seed"] == 11);
    CHECK(row["seed_source"] == "spec");
    CHECK(row["admissible"] == true);
    CHECK(row["gamma_bound"].get<double>() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(row["jarzynski_sum"].get<double>() == doctest::Approx((1 + std::exp(-2.0)) / (1 + std::exp(-1.0))).epsilon(1e-10));
    CHECK(row["jarzynski_sum"].get<double>() == doctest::Approx(0.8299966).epsilon(1e-7));
    CHECK(row["partition_ratio"].get<double>() == doctest::Approx(row["jarzynski_sum"].get<double>()).epsilon(1e-10));
    CHECK(row["free_energy_difference"].get<double>() == doctest::Approx(0.1863337).epsilon(1e-7));
    CHECK(row["average_work_joint"].get<double>() ==
          doctest::Approx(row["average_work_exact"].get<double>()).epsilon(1e-10));
    CHECK(row["fluctuation_residual"].get<double>() <= 1e-11);
    CHECK(row["marginal_residual"].get<double>() <= 1e-10);
    const double sampled = row["jarzynski_sum_sampled"], se = row["jarzynski_sum_sampled_stderr"];
    CHECK(std::abs(sampled - row["jarzynski_sum"].get<double>()) <= 4 * se);
}

TEST_CASE("trivial unitary run") {
    const json row = run_json(fixture("trivial.yaml"));
    CHECK(row["jarzynski_sum"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(row["average_work_exact"].get<double>()) <= 1e-12);
    CHECK(std::abs(row["average_work_joint"].get<double>()) <= 1e-10);
    CHECK(row["free_energy_difference"].get<double>() == 0.0);
    CHECK_FALSE(std::signbit(row["free_energy_difference"].get<double>()));
}

TEST_CASE("explicit basis and diagonal state") {
    const json row = run_json(fixture("explicit_basis.yaml"));
    CHECK(row["f"] == "corrected");
    CHECK(row["fluctuation_residual"].get<double>() <= 1e-11);
    CHECK(row["average_work_joint"].get<double>() ==
          doctest::Approx(row["average_work_exact"].get<double>()).epsilon(1e-10));
}

TEST_CASE("seed precedence: flag, then spec") {
    OutputOptions opts;
    opts.seed = 99;
    const json row = run_json(fixture("qubit_reference.yaml"), opts);
    CHECK(row["seed"] == 99);
    CHECK(row["seed_source"] == "flag");
    const json again = run_json(fixture("qubit_reference.yaml"), opts);
    CHECK(again == row);
}

TEST_CASE("inadmissible parameters exit 3 unless forced") {
    const Captured c =
        capture([](std::ostream& o, std::ostream& e) { return cmd_run(fixture("qutrit_inadmissible.yaml"), {}, o, e); });
    CHECK(c.code == kExitInadmissible);
    CHECK(c.err.find("exceeds the bound") != std::string::npos);
    OutputOptions forced;
    forced.force = true;
    forced.format = Format::JsonLines;
    const Captured f =
        capture([&](std::ostream& o, std::ostream& e) { return cmd_run(fixture("qutrit_inadmissible.yaml"), forced, o, e); });
    REQUIRE(f.code == kExitOk);
    const json row = json::parse(f.out);
    CHECK(row["admissible"] == false);
    CHECK(row["min_effect_eigenvalue"].get<double>() < 0.0);
    CHECK(tool("run " + fixture("qutrit_inadmissible.yaml")).code == kExitInadmissible);
}

TEST_CASE("json lines round trip byte for byte") {
    const Captured a = tool("--format json-lines run " + fixture("qubit_reference.yaml"));
    const Captured b = tool("--format json-lines run " + fixture("qubit_reference.yaml"));
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    const auto ls = lines(a.out);
    REQUIRE(ls.size() == 1);
    CHECK(nlohmann::ordered_json::parse(ls[0]).dump() == ls[0]);
}

TEST_CASE("output flag writes the machine-readable file") {
    const std::filesystem::path path = std::filesystem::temp_directory_path() / "jointwork_cli_test.csv";
    std::filesystem::remove(path);
    const Captured c = tool("--output " + path.string() + " bounds --d-max 3");
    REQUIRE(c.code == kExitOk);
    std::ifstream in(path);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(lines(content.str()).size() == 3);
    CHECK(lines(content.str())[1] == "2,0.7071068,0.7071068,0.7071068,0.2071068");
    std::filesystem::remove(path);
}

TEST_CASE("spec diagnostics carry line and column") {
    const Captured bad =
        capture([](std::ostream& o, std::ostream& e) { return cmd_run(fixture("bad_unitary.yaml"), {}, o, e); });
    CHECK(bad.code == kExitInput);
    CHECK(bad.err.find("bad_unitary.yaml:6:5: error:") != std::string::npos);
    const Captured syntax =
        capture([](std::ostream& o, std::ostream& e) { return cmd_run(fixture("bad_syntax.yaml"), {}, o, e); });
    CHECK(syntax.code == kExitInput);
    CHECK(syntax.err.find("bad_syntax.yaml:3:1: error:") != std::string::npos);
    CHECK(capture([](std::ostream& o, std::ostream& e) { return cmd_run(fixture("missing.yaml"), {}, o, e); }).code ==
          kExitInput);
    CHECK(tool("run " + fixture("bad_syntax.yaml")).code == kExitInput);
    CHECK(tool("nonsense").code == kExitInput);
}

TEST_CASE("problem spec parser") {
    const jointwork::cli::ProblemSpec s = jointwork::cli::parse_problem_spec(
        "dimension: 2\nH_A: {eigenvalues: [0, 1]}\nH_B: {eigenvalues: [0, 2]}\nunitary: identity\n"
        "lambda: 0.7\ngamma: 0.3\n");
    CHECK(s.dimension == 2);
    CHECK(s.beta == 1.0);
    CHECK(s.f == jointwork::AssignmentKind::Jarzynski);
    CHECK(s.g == jointwork::AssignmentKind::Naive);
    CHECK(s.samples == 100000u);
    CHECK_FALSE(s.seed.has_value());
    CHECK_THROWS_AS(jointwork::cli::parse_problem_spec("dimension: 2\nbogus: 1\n"), SpecError);
    CHECK_THROWS_AS(jointwork::cli::parse_problem_spec(
                        "dimension: 2\nH_A: {eigenvalues: [0, 1]}\nH_B: {eigenvalues: [0, 2]}\nunitary: identity\n"
                        "lambda: 1.0\ngamma: 0.3\n"),
                    SpecError);
    CHECK_THROWS_AS(jointwork::cli::parse_assignment_kind("fancy"), jointwork::InvalidArgument);
    CHECK_THROWS_AS(jointwork::cli::parse_problem_spec(
                        "dimension: 2\nH_A: {eigenvalues: [0, 1]}\nH_B: {eigenvalues: [0, 2]}\nunitary: identity\n"
                        "lambda: 0.7\ngamma: 0.3\nf: fancy\n"),
                    SpecError);
}

TEST_CASE("sample command") {
    OutputOptions opts;
    opts.format = Format::JsonLines;
    const Captured c = capture(
        [&](std::ostream& o, std::ostream& e) { return cmd_sample(fixture("qubit_reference.yaml"), 100000, opts, o, e); });
    REQUIRE(c.code == kExitOk);
    const auto ls = lines(c.out);
    REQUIRE(ls.size() == 4);
    std::uint64_t total = 0;
    double prob = 0.0;
    for (const auto& l : ls) {
        const json row = json::parse(l);
        total += row["count"].get<std::uint64_t>();
        prob += row["probability"].get<double>();
        const double p = row["probability"], fr = row["frequency"];
        CHECK(std::abs(fr - p) <= 4 * std::sqrt(p * (1 - p) / 1e5));
    }
    CHECK(total == 100000u);
    CHECK(prob == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(capture([&](std::ostream& o, std::ostream& e) {
              return cmd_sample(fixture("qubit_reference.yaml"), 0, opts, o, e);
          }).code == kExitInput);
}

TEST_CASE("verify command passes every check") {
    OutputOptions opts;
    opts.seed = 3;
    opts.format = Format::JsonLines;
    const Captured c = capture([&](std::ostream& o, std::ostream& e) { return cmd_verify(5, 2, 4, opts, o, e); });
    CHECK(c.code == kExitOk);
    const auto ls = lines(c.out);
    CHECK(ls.size() == 10 * 3);
    for (const auto& l : ls) {
        const json row = json::parse(l);
        CAPTURE(l);
        CHECK(row["pass"] == true);
        CHECK(row["max_residual"].get<double>() <= row["tolerance"].get<double>());
    }
}

TEST_CASE("feasibility command") {
    OutputOptions opts;
    opts.seed = 5;
    opts.format = Format::JsonLines;
    const Captured c =
        capture([&](std::ostream& o, std::ostream& e) { return cmd_feasibility(2, 10, 1e-7, 1e-3, opts, o, e); });
    REQUIRE(c.code == kExitOk);
    const json row = json::parse(c.out);
    CHECK(row["d"] == 2);
    CHECK(row["lambda_sym"].get<double>() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(row["lambda_estimate"].get<double>() <= std::sqrt(0.5) + 2e-3);
    CHECK(capture([&](std::ostream& o, std::ostream& e) { return cmd_feasibility(2, 0, 1e-7, 1e-3, opts, o, e); }).code ==
          kExitInput);
}
