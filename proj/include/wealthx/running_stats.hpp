#pragma once

#include <cmath>
#include <cstddef>

namespace wealthx {

// Welford accumulator. Feed values in a fixed order to get bit-reproducible
// results.
class RunningStats {
public:
    void push(double x) noexcept {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    [[nodiscard]] std::size_t count() const noexcept { return n_; }
    [[nodiscard]] double mean() const noexcept { return mean_; }

    [[nodiscard]] double variance_sample() const noexcept {
        return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
    }

    /// Standard error of the mean; 0 for fewer than two samples.
    [[nodiscard]] double stderr_mean() const noexcept {
        return n_ < 2 ? 0.0 : std::sqrt(variance_sample() / static_cast<double>(n_));
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace wealthx
