#include "wealthx/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#if defined(__SSE__) || defined(_M_X64)
#include <xmmintrin.h>
#define WEALTHX_HAVE_MXCSR 1
#endif

namespace wealthx {
namespace {

// Condensed populations drive losers' wealth into the subnormal range, where
// x86 arithmetic is two orders of magnitude slower. Inside a sweep, subnormal
// operands and results are treated as zero; the wealth discarded is below
// 2.3e-308 per agent.
class FlushSubnormals {
public:
#ifdef WEALTHX_HAVE_MXCSR
    FlushSubnormals() noexcept : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
    ~FlushSubnormals() { _mm_setcsr(saved_); }

private:
    unsigned int saved_;
#endif
};

inline double protection_probability_unchecked(double w_a, double w_b, double f) noexcept {
    const double sum = w_a + w_b;
    if (sum <= 0.0) return 0.5;
    return 0.5 + f * (std::abs(w_a - w_b) / sum);
}

inline ExchangeOutcome exchange_unchecked(Population& pop, const ExchangeConfig& cfg, Rng& rng) {
    const std::size_t n = pop.size();
    const std::size_t i = uniform_index(rng, n);
    std::size_t j = uniform_index(rng, n - 1);
    if (j >= i) ++j;

    const Holding a{pop.wealth(i), pop.risk_aversion(i)};
    const Holding b{pop.wealth(j), pop.risk_aversion(j)};
    const double p = protection_probability_unchecked(a.wealth, b.wealth, cfg.protection_f);
    // Ties go to i; p is exactly 1/2 there so the label does not matter.
    const bool i_is_poorer = !(b.wealth < a.wealth);
    const bool poorer_wins = uniform01(rng) < p;
    const bool i_wins = (i_is_poorer == poorer_wins);

    const LoserSide loser = i_wins ? LoserSide::second : LoserSide::first;
    const double dw = transfer_amount(cfg.rule, a, b, loser);
    ExchangeOutcome out{i_wins ? i : j, i_wins ? j : i, dw};
    pop.transfer(out.loser_index, out.winner_index, dw);
    return out;
}

}  // namespace

std::string_view to_string(ExchangeRule rule) noexcept {
    return rule == ExchangeRule::fair ? "fair" : "loser";
}

ExchangeRule parse_exchange_rule(std::string_view text) {
    if (text == "fair") return ExchangeRule::fair;
    if (text == "loser") return ExchangeRule::loser;
    throw std::invalid_argument("unknown exchange rule '" + std::string(text) + "'");
}

void ExchangeConfig::validate() const {
    if (!(protection_f >= 0.0 && protection_f <= 0.5)) {
        throw std::invalid_argument("protection_f must lie in [0, 0.5], got " + std::to_string(protection_f));
    }
}

double protection_probability(double w_a, double w_b, double f) {
    if (!(w_a >= 0.0) || !(w_b >= 0.0)) {
        throw std::invalid_argument("protection_probability: wealth must be non-negative");
    }
    if (!(f >= 0.0 && f <= 0.5)) {
        throw std::invalid_argument("protection_probability: f must lie in [0, 0.5]");
    }
    return protection_probability_unchecked(w_a, w_b, f);
}

double transfer_amount(ExchangeRule rule, Holding first, Holding second, LoserSide loser) noexcept {
    if (rule == ExchangeRule::fair) {
        return std::min(first.stake(), second.stake());
    }
    return loser == LoserSide::first ? first.stake() : second.stake();
}

ExchangeOutcome exchange_step(Population& pop, const ExchangeConfig& cfg, Rng& rng) {
    cfg.validate();
    return exchange_unchecked(pop, cfg, rng);
}

SweepSummary monte_carlo_step(Population& pop, const ExchangeConfig& cfg, Rng& rng) {
    cfg.validate();
    const FlushSubnormals ftz;
    SweepSummary summary;
    const std::size_t n = pop.size();
    for (std::size_t k = 0; k < n; ++k) {
        summary.volume += exchange_unchecked(pop, cfg, rng).amount;
    }
    summary.exchanges = n;
    return summary;
}

}  // namespace wealthx
