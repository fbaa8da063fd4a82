#include "wealthx/fiscal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace wealthx {

std::string_view to_string(Redistribution mode) noexcept {
    return mode == Redistribution::universal ? "universal" : "targeted";
}

Redistribution parse_redistribution(std::string_view text) {
    if (text == "universal") return Redistribution::universal;
    if (text == "targeted") return Redistribution::targeted;
    throw std::invalid_argument("unknown redistribution mode '" + std::string(text) + "'");
}

void FiscalPolicy::validate() const {
    if (!(tax_rate >= 0.0 && tax_rate <= 1.0)) {
        throw std::invalid_argument("tax_rate must lie in [0, 1], got " + std::to_string(tax_rate));
    }
    if (mode == Redistribution::targeted && !(target_fraction > 0.0 && target_fraction <= 1.0)) {
        throw std::invalid_argument("target_fraction must lie in (0, 1], got " + std::to_string(target_fraction));
    }
}

std::size_t FiscalPolicy::recipient_count(std::size_t n_agents) const noexcept {
    if (mode == Redistribution::universal) return n_agents;
    // The slack absorbs representation error in products like 0.29 * 100.
    const double raw = std::floor(target_fraction * static_cast<double>(n_agents) + 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, n_agents);
}

double collect_taxes(Population& pop, double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("tax rate must lie in [0, 1], got " + std::to_string(rate));
    }
    if (rate == 0.0) return 0.0;
    return pop.levy(rate);
}

void redistribute(Population& pop, double pool, const FiscalPolicy& policy) {
    if (!(pool >= 0.0)) {
        throw std::invalid_argument("pool must be non-negative");
    }
    policy.validate();
    const std::size_t n = pop.size();
    const std::size_t k = policy.recipient_count(n);
    if (k == n) {
        pop.grant_all(pool / static_cast<double>(n));
        return;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto wealth = pop.wealth();
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return wealth[a] < wealth[b] || (wealth[a] == wealth[b] && a < b);
                     });
    order.resize(k);
    std::sort(order.begin(), order.end());
    pop.grant(order, pool / static_cast<double>(k));
}

void fiscal_step(Population& pop, const FiscalPolicy& policy) {
    policy.validate();
    if (!policy.active()) return;
    const double pool = collect_taxes(pop, policy.tax_rate);
    redistribute(pop, pool, policy);
}

}  // namespace wealthx
