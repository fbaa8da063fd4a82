#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace wealthx {

// All functions take a wealth snapshot with non-negative entries (checked,
// std::invalid_argument otherwise) and are order-independent. A result of
// std::nullopt means the metric is undefined, e.g. zero total wealth.

/// Gini index, G = sum_ij |w_i - w_j| / (2 N sum_i w_i), evaluated in
/// O(N log N) from the gaps between consecutive sorted values.
std::optional<double> gini(std::span<const double> wealth);

/// Same, for input already sorted ascending (unchecked).
std::optional<double> gini_sorted(std::span<const double> ascending);

/// Gini over the agents with wealth >= threshold.
std::optional<double> gini_excluding_zwa(std::span<const double> wealth, double threshold);

/// Wealth share of the ceil(q N) richest agents, q in (0, 1].
std::optional<double> top_share(std::span<const double> wealth, double q);

/// Wealth share of the poorest agents complementary to top_share(1 - q), so
/// that top_share(q) + bottom_share(1 - q) == 1. q in [0, 1].
std::optional<double> bottom_share(std::span<const double> wealth, double q);

/// Fraction of agents with wealth strictly below threshold.
double zero_wealth_fraction(std::span<const double> wealth, double threshold);

/// Number of agents counted by top_share(q) for a population of n.
std::size_t top_count(double q, std::size_t n);

struct LorenzPoint {
    double population = 0.0;  ///< F, cumulative population fraction
    double wealth = 0.0;      ///< L, cumulative wealth fraction

    bool operator==(const LorenzPoint&) const = default;
};

struct LorenzCurve {
    std::vector<LorenzPoint> points;

    /// a / (a + b) from trapezoid areas, where b is the area under the curve.
    [[nodiscard]] double area_gini() const noexcept;
};

/// N + 1 points (k/N, share of the k poorest), from (0,0) to (1,1).
std::optional<LorenzCurve> lorenz_curve(std::span<const double> wealth);

struct InequalityReport {
    double gini = 0.0;
    /// NaN when every agent is below the threshold.
    double gini_excl_zwa = 0.0;
    double zero_wealth_fraction = 0.0;
    double top1_share = 0.0;
    double top10_share = 0.0;
    double bottom90_share = 0.0;

    bool operator==(const InequalityReport&) const = default;
};

/// Every report field from one sort. nullopt when total wealth is zero.
std::optional<InequalityReport> measure(std::span<const double> wealth, double zero_wealth_threshold);

}  // namespace wealthx
