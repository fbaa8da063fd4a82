#pragma once

#include <cstddef>
#include <string_view>

#include "wealthx/population.hpp"
#include "wealthx/rng.hpp"

namespace wealthx {

enum class ExchangeRule {
    fair,   ///< dw = min of the two stakes (yard-sale)
    loser,  ///< dw = the loser's stake
};

std::string_view to_string(ExchangeRule rule) noexcept;
/// Accepts "fair" or "loser"; throws std::invalid_argument otherwise.
ExchangeRule parse_exchange_rule(std::string_view text);

struct ExchangeConfig {
    ExchangeRule rule = ExchangeRule::fair;
    /// Social protection factor f in [0, 0.5].
    double protection_f = 0.0;

    void validate() const;
};

/// One side of a trade. The stake is the part of wealth put at risk.
struct Holding {
    double wealth = 0.0;
    double risk_aversion = 0.0;

    [[nodiscard]] double stake() const noexcept { return (1.0 - risk_aversion) * wealth; }
};

enum class LoserSide { first, second };

struct ExchangeOutcome {
    std::size_t winner_index = 0;
    std::size_t loser_index = 0;
    double amount = 0.0;
};

struct SweepSummary {
    std::size_t exchanges = 0;
    /// Sum of |dw| over the sweep.
    double volume = 0.0;
};

/// Probability that the poorer of the two agents wins:
/// 1/2 + f |w_a - w_b| / (w_a + w_b), and 1/2 when both wealths are zero.
/// Throws std::invalid_argument on negative wealth or f outside [0, 0.5].
double protection_probability(double w_a, double w_b, double f);

/// Amount the loser hands over. Never exceeds the loser's wealth.
double transfer_amount(ExchangeRule rule, Holding first, Holding second, LoserSide loser) noexcept;

/// Draws a uniform ordered pair of distinct agents, then one uniform variate
/// to pick the winner (the poorer agent wins with `protection_probability`),
/// then moves dw from loser to winner.
ExchangeOutcome exchange_step(Population& pop, const ExchangeConfig& cfg, Rng& rng);

/// One Monte Carlo step: exactly N exchange steps.
SweepSummary monte_carlo_step(Population& pop, const ExchangeConfig& cfg, Rng& rng);

}  // namespace wealthx
