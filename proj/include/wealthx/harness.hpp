#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wealthx/exchange.hpp"
#include "wealthx/fiscal.hpp"
#include "wealthx/inequality.hpp"
#include "wealthx/population.hpp"

namespace wealthx {

/// One replica: initial population, dynamics and the stopping rule.
struct ReplicaRun {
    SimConfig sim;
    ExchangeConfig exchange;
    FiscalPolicy fiscal;
    std::uint64_t max_steps = 1'000'000;
    /// Window length, in Monte Carlo steps, of the stationarity test.
    std::uint64_t equil_window = 1000;
    /// Relative change of the window-mean Gini that counts as stationary.
    double equil_tol = 1e-3;
    /// Metrics are sampled every this many steps inside a window.
    std::uint64_t sample_every = 10;

    void validate() const;
};

struct ReplicaResult {
    Population final_population;
    /// Mean of the samples over the last completed window.
    InequalityReport report;
    std::uint64_t steps_used = 0;
    bool converged = false;
};

/// Runs exchange sweeps (each followed by a fiscal step when the tax rate is
/// positive) until the window-mean Gini moves by less than equil_tol relative
/// to the previous window, or max_steps is hit (converged = false).
ReplicaResult run_to_equilibrium(const ReplicaRun& run);

struct MetricStats {
    double mean = 0.0;
    double stderr_mean = 0.0;

    bool operator==(const MetricStats&) const = default;
};

struct EnsembleStats {
    std::size_t n_replicas = 0;
    MetricStats gini;
    MetricStats gini_excl_zwa;
    MetricStats zero_wealth_fraction;
    MetricStats top1_share;
    MetricStats top10_share;
    MetricStats bottom90_share;
    double converged_fraction = 0.0;
    double mean_steps = 0.0;
    /// Pointwise mean over replicas of the final Lorenz curve, sampled at no
    /// more than lorenz_resolution + 1 population fractions F = k/N. Empty
    /// unless requested.
    std::vector<LorenzPoint> mean_lorenz;

    bool operator==(const EnsembleStats&) const = default;
};

struct EnsembleOptions {
    std::size_t n_replicas = 100;
    std::uint64_t master_seed = 0;
    /// 0 means one per hardware thread.
    std::size_t workers = 1;
    bool keep_lorenz = false;
    std::size_t lorenz_resolution = 1000;
};

/// Replica i runs `base` with sim.seed = replica_seed(master_seed, i). The
/// same replica seeds are reused at every grid point of a sweep. Results are
/// aggregated in replica order, so they do not depend on `workers`.
EnsembleStats run_ensemble(const ReplicaRun& base, const EnsembleOptions& options);

/// Same as run_ensemble, also returning each replica's result.
EnsembleStats run_ensemble(const ReplicaRun& base, const EnsembleOptions& options,
                           std::vector<ReplicaResult>& replicas);

struct SweepRow {
    std::vector<double> params;
    EnsembleStats stats;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::vector<std::string> param_names;
    std::vector<SweepRow> rows;
    std::size_t n_replicas = 0;

    bool operator==(const SweepResult&) const = default;
};

/// Ensemble per protection factor; sets base.exchange.protection_f.
SweepResult sweep_f(const std::vector<double>& f_values, const ReplicaRun& base, const EnsembleOptions& options);

/// Ensemble per tax rate under universal redistribution.
SweepResult sweep_lambda(const std::vector<double>& lambda_values, const ReplicaRun& base,
                         const EnsembleOptions& options);

/// Ensemble per (lambda, p) cell under targeted redistribution, lambda-major.
SweepResult grid_lambda_p(const std::vector<double>& lambda_values, const std::vector<double>& p_values,
                          const ReplicaRun& base, const EnsembleOptions& options);

struct PStarResult {
    double p_star = 1.0;
    double gini_at_p_star = 0.0;
    /// Every evaluated (lambda, p) cell, p ascending.
    SweepResult table;
};

/// Grid p with the lowest mean Gini at `lambda`; ties go to the smallest p.
PStarResult find_p_star(double lambda, const std::vector<double>& p_grid, const ReplicaRun& base,
                        const EnsembleOptions& options);

/// `count` log-spaced points from `p_min` (exclusive) up to 1 inclusive.
std::vector<double> log_p_grid(double p_min = 1e-3, std::size_t count = 12);

/// Adds `count` evenly spaced points strictly between the neighbours of the
/// coarse grid's minimizer. Returns the sorted, de-duplicated union.
std::vector<double> refine_p_grid(const std::vector<double>& coarse, double coarse_p_star, std::size_t count = 6);

/// Coarse log-grid search followed by a linear refinement around its
/// minimizer; the returned table holds both passes.
PStarResult search_p_star(double lambda, const ReplicaRun& base, const EnsembleOptions& options,
                          std::size_t coarse_points = 12, std::size_t refine_points = 6);

}  // namespace wealthx
