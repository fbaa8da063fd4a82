#include "wealthx/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wealthx {
namespace {

std::vector<double> sorted_copy(std::span<const double> wealth) {
    std::vector<double> out(wealth.begin(), wealth.end());
    for (double w : out) {
        if (!(w >= 0.0)) throw std::invalid_argument("wealth entries must be non-negative");
    }
    std::sort(out.begin(), out.end());
    return out;
}

double sum(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

std::size_t bottom_count(double q, std::size_t n) {
    if (q >= 1.0) return n;
    return n - top_count(1.0 - q, n);
}

// Share held by the `count` richest entries of an ascending vector.
double top_share_sorted(std::span<const double> ascending, std::size_t count, double total) {
    return sum(ascending.last(count)) / total;
}

double bottom_share_sorted(std::span<const double> ascending, std::size_t count, double total) {
    return sum(ascending.first(count)) / total;
}

// Suffix of an ascending vector at or above the threshold.
std::span<const double> survivors(std::span<const double> ascending, double threshold) {
    const auto first = std::lower_bound(ascending.begin(), ascending.end(), threshold);
    return ascending.subspan(static_cast<std::size_t>(first - ascending.begin()));
}

}  // namespace

std::size_t top_count(double q, std::size_t n) {
    if (!(q > 0.0 && q <= 1.0)) {
        throw std::invalid_argument("share fraction must lie in (0, 1], got " + std::to_string(q));
    }
    // Slack keeps 0.01 * 1000 from rounding up to 11.
    const double raw = std::ceil(q * static_cast<double>(n) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

std::optional<double> gini_sorted(std::span<const double> ascending) {
    const std::size_t n = ascending.size();
    if (n == 0) return std::nullopt;
    const double total = sum(ascending);
    if (!(total > 0.0)) return std::nullopt;
    // Gap between ranks k and k+1 separates k(n-k) pairs.
    double pairs = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double gap = ascending[k] - ascending[k - 1];
        if (gap != 0.0) {
            pairs += static_cast<double>(k) * static_cast<double>(n - k) * gap;
        }
    }
    return pairs / total / static_cast<double>(n);
}

std::optional<double> gini(std::span<const double> wealth) {
    const auto sorted = sorted_copy(wealth);
    return gini_sorted(sorted);
}

std::optional<double> gini_excluding_zwa(std::span<const double> wealth, double threshold) {
    const auto sorted = sorted_copy(wealth);
    return gini_sorted(survivors(sorted, threshold));
}

std::optional<double> top_share(std::span<const double> wealth, double q) {
    const auto sorted = sorted_copy(wealth);
    const std::size_t count = top_count(q, sorted.size());
    const double total = sum(sorted);
    if (!(total > 0.0)) return std::nullopt;
    return top_share_sorted(sorted, count, total);
}

std::optional<double> bottom_share(std::span<const double> wealth, double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("share fraction must lie in [0, 1], got " + std::to_string(q));
    }
    const auto sorted = sorted_copy(wealth);
    const double total = sum(sorted);
    if (!(total > 0.0)) return std::nullopt;
    return bottom_share_sorted(sorted, bottom_count(q, sorted.size()), total);
}

double zero_wealth_fraction(std::span<const double> wealth, double threshold) {
    if (wealth.empty()) return 0.0;
    const auto below = std::count_if(wealth.begin(), wealth.end(), [threshold](double w) { return w < threshold; });
    return static_cast<double>(below) / static_cast<double>(wealth.size());
}

double LorenzCurve::area_gini() const noexcept {
    double under = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k) {
        const double width = points[k].population - points[k - 1].population;
        under += 0.5 * width * (points[k].wealth + points[k - 1].wealth);
    }
    const double between = 0.5 - under;
    return between / (between + under);
}

std::optional<LorenzCurve> lorenz_curve(std::span<const double> wealth) {
    const auto sorted = sorted_copy(wealth);
    const double total = sum(sorted);
    if (sorted.empty() || !(total > 0.0)) return std::nullopt;

    const std::size_t n = sorted.size();
    LorenzCurve curve;
    curve.points.reserve(n + 1);
    curve.points.push_back({0.0, 0.0});
    double running = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        running += sorted[k - 1];
        curve.points.push_back({static_cast<double>(k) / static_cast<double>(n), std::min(running / total, 1.0)});
    }
    curve.points.push_back({1.0, 1.0});
    return curve;
}

std::optional<InequalityReport> measure(std::span<const double> wealth, double zero_wealth_threshold) {
    const auto sorted = sorted_copy(wealth);
    const double total = sum(sorted);
    if (sorted.empty() || !(total > 0.0)) return std::nullopt;

    const std::size_t n = sorted.size();
    InequalityReport r;
    r.gini = *gini_sorted(sorted);
    r.gini_excl_zwa = gini_sorted(survivors(sorted, zero_wealth_threshold))
                          .value_or(std::numeric_limits<double>::quiet_NaN());
    r.zero_wealth_fraction = zero_wealth_fraction(sorted, zero_wealth_threshold);
    r.top1_share = top_share_sorted(sorted, top_count(0.01, n), total);
    r.top10_share = top_share_sorted(sorted, top_count(0.10, n), total);
    r.bottom90_share = bottom_share_sorted(sorted, bottom_count(0.90, n), total);
    return r;
}

}  // namespace wealthx
