#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wealthx/harness.hpp"

namespace wealthx {

enum class Experiment { single_run, sweep_f, sweep_lambda, grid_lambda_p, p_star };
enum class OutputFormat { csv, jsonl };

std::string_view to_string(Experiment e) noexcept;
std::string_view to_string(OutputFormat f) noexcept;
Experiment parse_experiment(std::string_view name);

/// Fully resolved description of one invocation. Everything except the
/// experiment has a default.
struct RunManifest {
    Experiment experiment = Experiment::single_run;
    /// Template for every replica; sim.seed is replaced per replica.
    ReplicaRun run;
    std::uint64_t master_seed = 0;
    std::size_t replicas = 100;
    std::size_t workers = 0;

    std::vector<double> f_values;
    std::vector<double> lambda_values;
    /// Empty for p-star means: coarse log grid plus refinement.
    std::vector<double> p_values;
    double p_min = 1e-3;
    std::size_t p_coarse = 12;
    std::size_t p_refine = 6;

    bool lorenz = false;
    std::size_t lorenz_points = 1000;

    std::string out;
    OutputFormat format = OutputFormat::csv;
    std::string paper_scale;  // "", "curves" or "symbols"

    EnsembleOptions ensemble_options() const;
};

/// Bad or conflicting input. key() names the offending setting, without
/// leading dashes, or is empty when the problem is not tied to one key.
class UsageError : public std::runtime_error {
public:
    UsageError(std::string key, const std::string& message);
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Thrown by parse_manifest for --help; carries the formatted help text.
struct HelpRequested {
    std::string text;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Resolves command-line tokens (without the program name) into a validated
/// manifest. Sources, strongest first: flags, WEALTHX_* environment
/// variables, the key=value file named by --config (or WEALTHX_CONFIG),
/// built-in defaults.
RunManifest parse_manifest(const std::vector<std::string>& args, const EnvLookup& env = process_env);

/// `first, first + step, ...` up to `last`, each value rounded to 12
/// decimals so that decimal steps print cleanly.
std::vector<double> linear_grid(double first, double last, double step);

}  // namespace wealthx
