#include "wealthx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <iterator>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "wealthx/running_stats.hpp"

namespace wealthx {
namespace {

// Running sum of reports inside one stationarity window.
class WindowMean {
public:
    void add(const InequalityReport& r) noexcept {
        sum_.gini += r.gini;
        sum_.gini_excl_zwa += r.gini_excl_zwa;
        sum_.zero_wealth_fraction += r.zero_wealth_fraction;
        sum_.top1_share += r.top1_share;
        sum_.top10_share += r.top10_share;
        sum_.bottom90_share += r.bottom90_share;
        ++count_;
    }

    [[nodiscard]] bool empty() const noexcept { return count_ == 0; }

    [[nodiscard]] InequalityReport mean() const noexcept {
        const double n = static_cast<double>(count_);
        return {sum_.gini / n,         sum_.gini_excl_zwa / n, sum_.zero_wealth_fraction / n,
                sum_.top1_share / n,   sum_.top10_share / n,   sum_.bottom90_share / n};
    }

    void reset() noexcept { *this = WindowMean{}; }

private:
    InequalityReport sum_{0, 0, 0, 0, 0, 0};
    std::size_t count_ = 0;
};

bool stationary(double previous, double current, double tol) noexcept {
    if (previous == 0.0) return current == 0.0;
    return std::abs(current - previous) <= tol * std::abs(previous);
}

InequalityReport measure_or_throw(const Population& pop, double threshold) {
    auto r = measure(pop.wealth(), threshold);
    if (!r) throw std::runtime_error("inequality metrics undefined: total wealth is zero");
    return *r;
}

struct ReplicaRecord {
    InequalityReport report;
    std::uint64_t steps_used = 0;
    bool converged = false;
    std::vector<LorenzPoint> lorenz;
};

std::vector<LorenzPoint> subsample_lorenz(const Population& pop, std::size_t resolution) {
    const auto curve = lorenz_curve(pop.wealth());
    if (!curve) return {};
    const std::size_t n = pop.size();
    const std::size_t m = std::min(n, std::max<std::size_t>(resolution, 1));
    std::vector<LorenzPoint> out;
    out.reserve(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        const std::size_t k = (j * n + m / 2) / m;
        out.push_back(curve->points[k]);
    }
    return out;
}

// Runs every replica, calling sink(index, result) from the worker that
// produced it. Each index is delivered exactly once.
void run_replicas(const ReplicaRun& base, const EnsembleOptions& options,
                  const std::function<void(std::size_t, ReplicaResult&&)>& sink) {
    base.validate();
    if (options.n_replicas < 1) throw std::invalid_argument("n_replicas must be at least 1");

    std::size_t workers = options.workers == 0 ? std::thread::hardware_concurrency() : options.workers;
    workers = std::clamp<std::size_t>(workers, 1, options.n_replicas);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < options.n_replicas; i = next++) {
            try {
                ReplicaRun run = base;
                run.sim.seed = replica_seed(options.master_seed, i);
                sink(i, run_to_equilibrium(run));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = options.n_replicas;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

EnsembleStats aggregate(const std::vector<ReplicaRecord>& records, bool keep_lorenz) {
    RunningStats gini, excl, zwf, top1, top10, bottom90, steps;
    std::size_t converged = 0;
    for (const auto& rec : records) {
        gini.push(rec.report.gini);
        excl.push(rec.report.gini_excl_zwa);
        zwf.push(rec.report.zero_wealth_fraction);
        top1.push(rec.report.top1_share);
        top10.push(rec.report.top10_share);
        bottom90.push(rec.report.bottom90_share);
        steps.push(static_cast<double>(rec.steps_used));
        if (rec.converged) ++converged;
    }
    auto stats = [](const RunningStats& s) { return MetricStats{s.mean(), s.stderr_mean()}; };

    EnsembleStats out;
    out.n_replicas = records.size();
    out.gini = stats(gini);
    out.gini_excl_zwa = stats(excl);
    out.zero_wealth_fraction = stats(zwf);
    out.top1_share = stats(top1);
    out.top10_share = stats(top10);
    out.bottom90_share = stats(bottom90);
    out.converged_fraction = static_cast<double>(converged) / static_cast<double>(records.size());
    out.mean_steps = steps.mean();

    if (keep_lorenz && !records.empty() && !records.front().lorenz.empty()) {
        const std::size_t m = records.front().lorenz.size();
        std::vector<RunningStats> level(m);
        for (const auto& rec : records) {
            for (std::size_t k = 0; k < m; ++k) level[k].push(rec.lorenz[k].wealth);
        }
        out.mean_lorenz.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            out.mean_lorenz[k] = {records.front().lorenz[k].population, level[k].mean()};
        }
        out.mean_lorenz.front().wealth = 0.0;
        out.mean_lorenz.back().wealth = 1.0;
    }
    return out;
}

ReplicaRecord to_record(const ReplicaResult& r, const EnsembleOptions& options) {
    ReplicaRecord rec{r.report, r.steps_used, r.converged, {}};
    if (options.keep_lorenz) rec.lorenz = subsample_lorenz(r.final_population, options.lorenz_resolution);
    return rec;
}

}  // namespace

void ReplicaRun::validate() const {
    sim.validate();
    exchange.validate();
    fiscal.validate();
    if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
    if (equil_window < 1) throw std::invalid_argument("equil_window must be positive");
    if (equil_window >= max_steps) throw std::invalid_argument("equil_window must be smaller than max_steps");
    if (!(equil_tol > 0.0)) throw std::invalid_argument("equil_tol must be positive");
    if (sample_every < 1 || sample_every > equil_window) {
        throw std::invalid_argument("sample_every must lie in [1, equil_window]");
    }
}

ReplicaResult run_to_equilibrium(const ReplicaRun& run) {
    run.validate();
    Rng rng(run.sim.seed);
    Population pop = init_population(run.sim, rng);
    const double threshold = run.sim.zero_wealth_threshold;
    const bool taxed = run.fiscal.active();

    WindowMean window;
    std::optional<InequalityReport> last_window;
    std::uint64_t step = 0;
    bool converged = false;

    while (step < run.max_steps) {
        monte_carlo_step(pop, run.exchange, rng);
        if (taxed) fiscal_step(pop, run.fiscal);
        ++step;

        if (step % run.sample_every == 0) window.add(measure_or_throw(pop, threshold));
        if (step % run.equil_window == 0 && !window.empty()) {
            const InequalityReport current = window.mean();
            window.reset();
            const bool settled = last_window && stationary(last_window->gini, current.gini, run.equil_tol);
            last_window = current;
            if (settled) {
                converged = true;
                break;
            }
        }
    }

    InequalityReport report = last_window ? *last_window
                              : window.empty() ? measure_or_throw(pop, threshold)
                                               : window.mean();
    return ReplicaResult{std::move(pop), report, step, converged};
}

EnsembleStats run_ensemble(const ReplicaRun& base, const EnsembleOptions& options) {
    std::vector<ReplicaRecord> records(options.n_replicas);
    run_replicas(base, options, [&](std::size_t i, ReplicaResult&& r) { records[i] = to_record(r, options); });
    return aggregate(records, options.keep_lorenz);
}

EnsembleStats run_ensemble(const ReplicaRun& base, const EnsembleOptions& options,
                           std::vector<ReplicaResult>& replicas) {
    std::vector<std::optional<ReplicaResult>> slots(options.n_replicas);
    std::vector<ReplicaRecord> records(options.n_replicas);
    run_replicas(base, options, [&](std::size_t i, ReplicaResult&& r) {
        records[i] = to_record(r, options);
        slots[i].emplace(std::move(r));
    });
    replicas.clear();
    replicas.reserve(slots.size());
    for (auto& s : slots) replicas.push_back(std::move(*s));
    return aggregate(records, options.keep_lorenz);
}

SweepResult sweep_f(const std::vector<double>& f_values, const ReplicaRun& base, const EnsembleOptions& options) {
    SweepResult out{{"f"}, {}, options.n_replicas};
    for (double f : f_values) {
        ReplicaRun run = base;
        run.exchange.protection_f = f;
        out.rows.push_back({{f}, run_ensemble(run, options)});
    }
    return out;
}

SweepResult sweep_lambda(const std::vector<double>& lambda_values, const ReplicaRun& base,
                         const EnsembleOptions& options) {
    SweepResult out{{"lambda"}, {}, options.n_replicas};
    for (double lambda : lambda_values) {
        ReplicaRun run = base;
        run.fiscal = FiscalPolicy::universal(lambda);
        out.rows.push_back({{lambda}, run_ensemble(run, options)});
    }
    return out;
}

SweepResult grid_lambda_p(const std::vector<double>& lambda_values, const std::vector<double>& p_values,
                          const ReplicaRun& base, const EnsembleOptions& options) {
    SweepResult out{{"lambda", "p"}, {}, options.n_replicas};
    for (double lambda : lambda_values) {
        for (double p : p_values) {
            ReplicaRun run = base;
            run.fiscal = FiscalPolicy::targeted(lambda, p);
            out.rows.push_back({{lambda, p}, run_ensemble(run, options)});
        }
    }
    return out;
}

namespace {

PStarResult pick_p_star(SweepResult table) {
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.params[1] < b.params[1]; });
    PStarResult out;
    const SweepRow* best = &table.rows.front();
    for (const auto& row : table.rows) {
        if (row.stats.gini.mean < best->stats.gini.mean) best = &row;
    }
    out.p_star = best->params[1];
    out.gini_at_p_star = best->stats.gini.mean;
    out.table = std::move(table);
    return out;
}

void check_p_grid(const std::vector<double>& p_grid) {
    if (p_grid.empty()) throw std::invalid_argument("p grid must not be empty");
    if (!std::is_sorted(p_grid.begin(), p_grid.end())) throw std::invalid_argument("p grid must be sorted");
}

}  // namespace

PStarResult find_p_star(double lambda, const std::vector<double>& p_grid, const ReplicaRun& base,
                        const EnsembleOptions& options) {
    check_p_grid(p_grid);
    return pick_p_star(grid_lambda_p({lambda}, p_grid, base, options));
}

std::vector<double> log_p_grid(double p_min, std::size_t count) {
    if (!(p_min > 0.0 && p_min < 1.0) || count < 1) {
        throw std::invalid_argument("log_p_grid needs 0 < p_min < 1 and count >= 1");
    }
    std::vector<double> grid;
    grid.reserve(count);
    const double decades = std::log10(p_min);
    for (std::size_t i = 1; i <= count; ++i) {
        const double frac = static_cast<double>(count - i) / static_cast<double>(count);
        grid.push_back(i == count ? 1.0 : std::pow(10.0, decades * frac));
    }
    return grid;
}

std::vector<double> refine_p_grid(const std::vector<double>& coarse, double coarse_p_star, std::size_t count) {
    check_p_grid(coarse);
    const auto at = std::lower_bound(coarse.begin(), coarse.end(), coarse_p_star);
    if (at == coarse.end() || *at != coarse_p_star) {
        throw std::invalid_argument("coarse p* is not a point of the coarse grid");
    }
    const double lo = at == coarse.begin() ? *at : *(at - 1);
    const double hi = at + 1 == coarse.end() ? *at : *(at + 1);

    std::vector<double> out = coarse;
    for (std::size_t m = 1; m <= count && hi > lo; ++m) {
        out.push_back(lo + (hi - lo) * static_cast<double>(m) / static_cast<double>(count + 1));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PStarResult search_p_star(double lambda, const ReplicaRun& base, const EnsembleOptions& options,
                          std::size_t coarse_points, std::size_t refine_points) {
    const auto coarse = log_p_grid(1e-3, coarse_points);
    PStarResult first = find_p_star(lambda, coarse, base, options);
    const auto fine = refine_p_grid(coarse, first.p_star, refine_points);

    std::vector<double> extra;
    std::set_difference(fine.begin(), fine.end(), coarse.begin(), coarse.end(), std::back_inserter(extra));
    SweepResult table = std::move(first.table);
    if (!extra.empty()) {
        SweepResult more = grid_lambda_p({lambda}, extra, base, options);
        for (auto& row : more.rows) table.rows.push_back(std::move(row));
    }
    return pick_p_star(std::move(table));
}

}  // namespace wealthx
