// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jointwork::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitInput = 2,
    kExitInadmissible = 3,
    kExitNonConvergence = 4,
};

enum class Format { Csv, JsonLines };

struct OutputOptions {
    int precision = 7; ///< significant digits in CSV, 1..15
    Format format = Format::Csv;
    std::optional<std::string> output; ///< machine-readable output goes here instead of stdout
    std::optional<std::uint64_t> seed;
    bool force = false;
};

/// Rows with a fixed column order. CSV cells use `precision` significant
/// digits; JSON lines keep full round-trip precision.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::ordered_json>> rows;
};

void write_csv(const Table& table, int precision, std::ostream& out);
void write_json_lines(const Table& table, std::ostream& out);
std::string format_number(double value, int precision);

int cmd_bounds(int d_min, int d_max, const OutputOptions& options, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& spec_path, const OutputOptions& options, std::ostream& out, std::ostream& err);
int cmd_sample(const std::string& spec_path, std::optional<std::uint64_t> samples, const OutputOptions& options,
               std::ostream& out, std::ostream& err);
int cmd_verify(std::size_t cases, int d_min, int d_max, const OutputOptions& options, std::ostream& out,
               std::ostream& err);
int cmd_feasibility(int dim, std::size_t unitaries, double tol, double resolution, const OutputOptions& options,
                    std::ostream& out, std::ostream& err);

} // namespace jointwork::cli
