#pragma once

#include <cstddef>
#include <string_view>

#include "wealthx/population.hpp"

namespace wealthx {

enum class Redistribution {
    universal,  ///< pool split equally among all agents
    targeted,   ///< pool split equally among the poorest fraction
};

std::string_view to_string(Redistribution mode) noexcept;
/// Accepts "universal" or "targeted"; throws std::invalid_argument otherwise.
Redistribution parse_redistribution(std::string_view text);

/// Flat wealth tax applied once per Monte Carlo step.
struct FiscalPolicy {
    double tax_rate = 0.0;
    Redistribution mode = Redistribution::universal;
    /// Recipient fraction p in (0, 1]; only read in targeted mode.
    double target_fraction = 1.0;

    static FiscalPolicy universal(double tax_rate) { return {tax_rate, Redistribution::universal, 1.0}; }
    static FiscalPolicy targeted(double tax_rate, double p) { return {tax_rate, Redistribution::targeted, p}; }

    void validate() const;
    [[nodiscard]] bool active() const noexcept { return tax_rate > 0.0; }
    /// max(1, floor(p N)) in targeted mode, N in universal mode.
    [[nodiscard]] std::size_t recipient_count(std::size_t n_agents) const noexcept;
};

/// Takes `rate` of every agent's wealth and returns the pool.
double collect_taxes(Population& pop, double rate);

/// Pays `pool` out according to `policy.mode`. Targeted recipients are the
/// poorest agents by current wealth, ties broken by lower index.
void redistribute(Population& pop, double pool, const FiscalPolicy& policy);

/// collect_taxes followed by redistribute.
void fiscal_step(Population& pop, const FiscalPolicy& policy);

}  // namespace wealthx
