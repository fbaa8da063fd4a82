#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wealthx/rng.hpp"

namespace wealthx {

struct SimConfig {
    std::size_t n_agents = 1000;
    std::uint64_t seed = 0;
    /// Agents below this wealth count as zero-wealth in metrics. Never used
    /// to quantize wealth during the dynamics.
    double zero_wealth_threshold = 1e-7;

    /// Throws std::invalid_argument on N < 2 or a non-positive threshold.
    void validate() const;
};

/// Agent wealth and fixed risk aversion, plus a cached total.
///
/// The cached total is the conserved quantity: exchanges leave it untouched,
/// `levy` lowers it by the pool and `grant*` raise it by what was paid out.
class Population {
public:
    /// Throws std::invalid_argument on size mismatch, fewer than two agents,
    /// negative or non-finite wealth, or risk aversion outside [0, 1].
    Population(std::vector<double> wealth, std::vector<double> risk_aversion);

    [[nodiscard]] std::size_t size() const noexcept { return wealth_.size(); }
    [[nodiscard]] std::span<const double> wealth() const noexcept { return wealth_; }
    [[nodiscard]] std::span<const double> risk_aversion() const noexcept { return risk_aversion_; }
    [[nodiscard]] double wealth(std::size_t i) const noexcept { return wealth_[i]; }
    [[nodiscard]] double risk_aversion(std::size_t i) const noexcept { return risk_aversion_[i]; }

    [[nodiscard]] double total_wealth() const noexcept { return total_; }
    [[nodiscard]] double recompute_total() const noexcept;

    /// True when the cached total matches a fresh sum within `rel_tol`.
    [[nodiscard]] bool total_consistent(double rel_tol = 1e-9) const noexcept;
    /// Throws std::logic_error when `total_consistent(rel_tol)` fails.
    void verify_total(double rel_tol = 1e-9) const;

    /// Moves `amount` from agent `from` to agent `to`. Caller guarantees
    /// 0 <= amount <= wealth(from).
    void transfer(std::size_t from, std::size_t to, double amount) noexcept {
        wealth_[from] -= amount;
        wealth_[to] += amount;
    }

    /// Scales every wealth by (1 - rate) and returns what was removed.
    double levy(double rate) noexcept;
    void grant_all(double amount_each) noexcept;
    void grant(std::span<const std::size_t> recipients, double amount_each) noexcept;

    bool operator==(const Population&) const = default;

private:
    std::vector<double> wealth_;
    std::vector<double> risk_aversion_;
    double total_ = 0.0;
};

/// Wealth then risk aversion, each i.i.d. uniform on [0, 1), drawn from `rng`.
Population init_population(const SimConfig& config, Rng& rng);
/// Same, from a fresh stream seeded with `config.seed`.
Population init_population(const SimConfig& config);

}  // namespace wealthx
