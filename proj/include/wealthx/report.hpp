#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wealthx/harness.hpp"
#include "wealthx/manifest.hpp"

namespace wealthx {

inline constexpr const char* version_string = "0.1.0";

struct ExperimentOutcome {
    SweepResult table;
    /// Only for the p-star experiment.
    std::optional<double> p_star;
    std::optional<double> gini_at_p_star;

    /// Replicas that hit max_steps, summed over every row.
    std::size_t unconverged_replicas() const;
};

/// Runs whatever the manifest asks for.
ExperimentOutcome run_experiment(const RunManifest& manifest);

struct OutputPaths {
    std::filesystem::path data;
    std::filesystem::path lorenz;  // empty unless the manifest asks for curves
    std::filesystem::path meta;
};

/// Data goes to manifest.out; the Lorenz and metadata files sit next to it
/// (results.csv -> results.lorenz.csv, results.meta.json).
OutputPaths output_paths(const RunManifest& manifest);

/// Column names of the summary table, swept parameters first.
std::vector<std::string> table_columns(const SweepResult& table);

void write_table(std::ostream& os, const SweepResult& table, OutputFormat format);

/// Long format: one line per (parameter tuple, F, L) point.
void write_lorenz(std::ostream& os, const SweepResult& table, OutputFormat format);

/// Resolved manifest as pretty-printed JSON.
std::string manifest_json(const RunManifest& manifest);

/// Writes data, optional Lorenz curves and the metadata sidecar. Failures are
/// reported as std::runtime_error naming the path.
OutputPaths emit_results(const ExperimentOutcome& outcome, const RunManifest& manifest);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double x);

/// Whole command-line program; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int runtime = 3;
inline constexpr int unconverged = 4;
}  // namespace exit_code

}  // namespace wealthx
