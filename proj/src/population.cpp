#include "wealthx/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wealthx {

void SimConfig::validate() const {
    if (n_agents < 2) {
        throw std::invalid_argument("n_agents must be at least 2, got " + std::to_string(n_agents));
    }
    if (!(zero_wealth_threshold > 0.0) || !std::isfinite(zero_wealth_threshold)) {
        throw std::invalid_argument("zero_wealth_threshold must be positive");
    }
}

Population::Population(std::vector<double> wealth, std::vector<double> risk_aversion)
    : wealth_(std::move(wealth)), risk_aversion_(std::move(risk_aversion)) {
    if (wealth_.size() != risk_aversion_.size()) {
        throw std::invalid_argument("wealth and risk_aversion lengths differ");
    }
    if (wealth_.size() < 2) {
        throw std::invalid_argument("population needs at least 2 agents");
    }
    for (std::size_t i = 0; i < wealth_.size(); ++i) {
        if (!(wealth_[i] >= 0.0) || !std::isfinite(wealth_[i])) {
            throw std::invalid_argument("wealth[" + std::to_string(i) + "] must be finite and >= 0");
        }
        if (!(risk_aversion_[i] >= 0.0 && risk_aversion_[i] <= 1.0)) {
            throw std::invalid_argument("risk_aversion[" + std::to_string(i) + "] outside [0, 1]");
        }
    }
    total_ = recompute_total();
}

double Population::recompute_total() const noexcept {
    return std::accumulate(wealth_.begin(), wealth_.end(), 0.0);
}

bool Population::total_consistent(double rel_tol) const noexcept {
    const double fresh = recompute_total();
    const double scale = std::max(std::abs(total_), std::abs(fresh));
    return std::abs(fresh - total_) <= rel_tol * scale;
}

void Population::verify_total(double rel_tol) const {
    if (!total_consistent(rel_tol)) {
        throw std::logic_error("cached total wealth " + std::to_string(total_) +
                               " disagrees with recomputed " + std::to_string(recompute_total()));
    }
}

double Population::levy(double rate) noexcept {
    const double keep = 1.0 - rate;
    double pool = 0.0;
    for (double& w : wealth_) {
        const double kept = w * keep;
        pool += w - kept;
        w = kept;
    }
    total_ -= pool;
    return pool;
}

void Population::grant_all(double amount_each) noexcept {
    for (double& w : wealth_) w += amount_each;
    total_ += amount_each * static_cast<double>(wealth_.size());
}

void Population::grant(std::span<const std::size_t> recipients, double amount_each) noexcept {
    for (std::size_t i : recipients) wealth_[i] += amount_each;
    total_ += amount_each * static_cast<double>(recipients.size());
}

Population init_population(const SimConfig& config, Rng& rng) {
    config.validate();
    std::vector<double> wealth(config.n_agents);
    std::vector<double> risk(config.n_agents);
    for (double& w : wealth) w = uniform01(rng);
    for (double& b : risk) b = uniform01(rng);
    return Population(std::move(wealth), std::move(risk));
}

Population init_population(const SimConfig& config) {
    Rng rng(config.seed);
    return init_population(config, rng);
}

}  // namespace wealthx
