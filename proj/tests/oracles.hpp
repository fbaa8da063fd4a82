#pragma once

// Brute-force reference implementations used only by tests. They follow the
// textbook definitions directly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wealthx::oracle {

// G = (1/2) sum_{i,j} |w_i - w_j| / (N sum_i w_i), O(N^2).
inline double gini_double_sum(std::span<const double> w) {
    long double pairs = 0.0L;
    long double total = 0.0L;
    for (double a : w) {
        total += a;
        for (double b : w) pairs += std::fabs(static_cast<long double>(a) - b);
    }
    return static_cast<double>(0.5L * pairs / (static_cast<long double>(w.size()) * total));
}

// Kolmogorov distance between the empirical CDF of `x` and U[0, 1).
inline double ks_uniform(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        d = std::max(d, static_cast<double>(i + 1) / n - x[i]);
        d = std::max(d, x[i] - static_cast<double>(i) / n);
    }
    return d;
}

// Gini as a / (a + b) from a trapezoid integration of the Lorenz curve built
// from a plain sort and running sum.
inline double gini_lorenz_trapezoid(std::vector<double> w) {
    std::sort(w.begin(), w.end());
    double total = 0.0;
    for (double v : w) total += v;
    const double n = static_cast<double>(w.size());
    double below = 0.0;
    double prev = 0.0;
    double run = 0.0;
    for (double v : w) {
        run += v;
        const double level = run / total;
        below += (prev + level) / (2.0 * n);
        prev = level;
    }
    const double a = 0.5 - below;
    return a / (a + below);
}

}  // namespace wealthx::oracle
