#include "doctest.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "../oracles.hpp"
#include "wealthx/population.hpp"

using namespace wealthx;

TEST_CASE("init_population rejects fewer than two agents") {
    CHECK_THROWS_AS(init_population(SimConfig{1, 7, 1e-7}), std::invalid_argument);
    CHECK_THROWS_AS(init_population(SimConfig{0, 7, 1e-7}), std::invalid_argument);
    CHECK_THROWS_AS(init_population(SimConfig{10, 7, 0.0}), std::invalid_argument);
}

TEST_CASE("same seed gives a bit-identical population") {
    const SimConfig cfg{2, 12345, 1e-7};
    CHECK(init_population(cfg) == init_population(cfg));
    const SimConfig other{2, 12346, 1e-7};
    CHECK_FALSE(init_population(cfg) == init_population(other));
}

TEST_CASE("uniform initial wealth has mean one half") {
    const auto pop = init_population(SimConfig{100'000, 3, 1e-7});
    const double mean = pop.total_wealth() / static_cast<double>(pop.size());
    CHECK(std::abs(mean - 0.5) < 0.01);
    for (double w : pop.wealth()) {
        REQUIRE(w >= 0.0);
        REQUIRE(w < 1.0);
    }
}

TEST_CASE("risk aversion is uniform within Kolmogorov distance 0.02") {
    const auto pop = init_population(SimConfig{10'000, 99, 1e-7});
    const std::vector<double> beta(pop.risk_aversion().begin(), pop.risk_aversion().end());
    CHECK(oracle::ks_uniform(beta) < 0.02);
}

TEST_CASE("total_wealth is the cached sum") {
    CHECK(Population({0.25, 0.75}, {0.5, 0.5}).total_wealth() == 1.0);
    CHECK(Population({0.0, 0.0, 0.0}, {0.1, 0.2, 0.3}).total_wealth() == 0.0);

    const auto pop = init_population(SimConfig{1000, 5, 1e-7});
    const double fresh = std::accumulate(pop.wealth().begin(), pop.wealth().end(), 0.0);
    CHECK(std::abs(pop.total_wealth() - fresh) <= 1e-9 * fresh);
    CHECK(pop.total_consistent());
    CHECK_NOTHROW(pop.verify_total());
}

TEST_CASE("population constructor validates agent state") {
    CHECK_THROWS_AS(Population({0.1}, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(Population({0.1, 0.2}, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(Population({-0.1, 0.2}, {0.1, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(Population({0.1, 0.2}, {0.1, 1.5}), std::invalid_argument);
    CHECK_NOTHROW(Population({0.1, 0.2}, {0.0, 1.0}));
}

TEST_CASE("levy and grants move the cached total with the wealth") {
    Population pop({0.2, 0.8}, {0.0, 0.0});
    const double pool = pop.levy(0.25);
    CHECK(pool == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(pop.total_wealth() == doctest::Approx(0.75).epsilon(1e-15));
    pop.grant_all(pool / 2.0);
    CHECK(pop.total_consistent(1e-15));
    CHECK(pop.total_wealth() == doctest::Approx(1.0).epsilon(1e-15));
}
