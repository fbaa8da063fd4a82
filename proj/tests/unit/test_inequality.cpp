#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "../oracles.hpp"
#include "wealthx/inequality.hpp"

using namespace wealthx;

namespace {

std::vector<double> random_wealth(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(n);
    for (double& x : w) x = u(gen);
    return w;
}

}  // namespace

TEST_CASE("gini closed forms") {
    CHECK(*gini(std::vector<double>(10, 0.3)) == 0.0);
    CHECK(*gini(std::vector<double>(1000, 0.5)) == 0.0);
    for (std::size_t n : {2u, 3u, 10u, 1000u}) {
        std::vector<double> w(n, 0.0);
        w[n / 2] = 7.25;
        CHECK(*gini(w) == static_cast<double>(n - 1) / static_cast<double>(n));
    }
    CHECK(*gini(std::vector<double>{0.1, 0.2, 0.3, 0.4}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(oracle::gini_double_sum(std::vector<double>{0.1, 0.2, 0.3, 0.4}) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("gini is undefined for zero total wealth and rejects negative entries") {
    CHECK_FALSE(gini(std::vector<double>{0.0, 0.0}).has_value());
    CHECK_FALSE(gini(std::vector<double>{}).has_value());
    CHECK_THROWS_AS(gini(std::vector<double>{0.1, -0.1}), std::invalid_argument);
}

TEST_CASE("sorted-gap gini matches the double-sum oracle") {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<std::size_t> size(2, 300);
    for (int trial = 0; trial < 200; ++trial) {
        auto w = random_wealth(gen, size(gen));
        if (trial % 3 == 0) {
            for (std::size_t i = 0; i < w.size(); i += 2) w[i] = 0.0;
        }
        REQUIRE(std::abs(*gini(w) - oracle::gini_double_sum(w)) <= 1e-10);
    }
}

TEST_CASE("gini is scale and permutation invariant") {
    std::mt19937_64 gen(2);
    auto w = random_wealth(gen, 500);
    const double g = *gini(w);
    auto doubled = w;
    for (double& x : doubled) x *= 2.0;
    CHECK(*gini(doubled) == g);
    auto scaled = w;
    for (double& x : scaled) x *= 3.7;
    CHECK(*gini(scaled) == doctest::Approx(g).epsilon(1e-13));
    std::shuffle(w.begin(), w.end(), gen);
    CHECK(*gini(w) == g);
}

TEST_CASE("transfer principle: rich-to-poor transfers never raise gini") {
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::size_t> pick(0, 99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        auto w = random_wealth(gen, 100);
        const std::size_t a = pick(gen);
        const std::size_t b = pick(gen);
        if (w[a] == w[b]) continue;
        const std::size_t rich = w[a] > w[b] ? a : b;
        const std::size_t poor = w[a] > w[b] ? b : a;
        const double before = *gini(w);
        const double eps = 0.5 * (w[rich] - w[poor]) * u(gen);
        w[rich] -= eps;
        w[poor] += eps;
        REQUIRE(*gini(w) <= before + 1e-15);
    }
}

TEST_CASE("gini excluding zero-wealth agents") {
    std::mt19937_64 gen(4);
    auto w = random_wealth(gen, 200);
    for (double& x : w) x += 1e-3;
    CHECK(*gini_excluding_zwa(w, 1e-7) == *gini(w));
    CHECK(*gini_excluding_zwa(std::vector<double>{0.0, 0.0, 0.5, 0.5}, 1e-7) == 0.0);
    CHECK(*gini_excluding_zwa(std::vector<double>{1e-9, 3e-12, 0.0, 2.0}, 1e-7) == 0.0);
    CHECK_FALSE(gini_excluding_zwa(std::vector<double>{1e-9, 0.0}, 1e-7).has_value());
}

TEST_CASE("top and bottom shares") {
    const std::vector<double> w{1, 1, 1, 7};
    CHECK(*top_share(w, 0.25) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(*top_share(w, 1.0) == 1.0);
    CHECK(*top_share(std::vector<double>(1000, 0.4), 0.1) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(top_count(0.01, 1000) == 10);
    CHECK(top_count(0.01, 50) == 1);
    CHECK(top_count(0.1, 1000) == 100);
    CHECK_THROWS_AS(top_share(w, 0.0), std::invalid_argument);
    CHECK_FALSE(top_share(std::vector<double>{0.0, 0.0}, 0.5).has_value());

    std::mt19937_64 gen(5);
    for (std::size_t n : {7u, 100u, 1000u, 1234u}) {
        const auto v = random_wealth(gen, n);
        for (double q : {0.01, 0.1, 0.25, 0.5, 0.9}) {
            REQUIRE(std::abs(*top_share(v, q) + *bottom_share(v, 1.0 - q) - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("zero wealth fraction") {
    CHECK(zero_wealth_fraction(std::vector<double>{0.0, 5e-8, 1e-7, 0.3}, 1e-7) == 0.5);
    CHECK(zero_wealth_fraction(std::vector<double>{0.2, 0.3}, 1e-7) == 0.0);
    std::mt19937_64 gen(6);
    const auto w = random_wealth(gen, 100'000);
    CHECK(zero_wealth_fraction(w, 1e-7) <= 1e-4);
}

TEST_CASE("lorenz curve shape") {
    const auto equal = *lorenz_curve(std::vector<double>(8, 2.0));
    REQUIRE(equal.points.size() == 9);
    for (const auto& pt : equal.points) CHECK(pt.wealth == doctest::Approx(pt.population).epsilon(1e-15));

    const auto extreme = *lorenz_curve(std::vector<double>{0.0, 3.0, 0.0, 0.0});
    REQUIRE(extreme.points.size() == 5);
    for (std::size_t k = 0; k < 4; ++k) CHECK(extreme.points[k].wealth == 0.0);
    CHECK(extreme.points[3].population == 0.75);
    CHECK(extreme.points[4].population == 1.0);
    CHECK(extreme.points[4].wealth == 1.0);

    CHECK_FALSE(lorenz_curve(std::vector<double>{0.0, 0.0}).has_value());
}

TEST_CASE("lorenz curve invariants and area gini") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<std::size_t> size(2, 2000);
    for (int trial = 0; trial < 50; ++trial) {
        auto w = random_wealth(gen, size(gen));
        for (double& x : w) x = x * x * x;  // skew
        const auto curve = *lorenz_curve(w);
        const std::size_t n = w.size();
        REQUIRE(curve.points.front() == LorenzPoint{0.0, 0.0});
        REQUIRE(curve.points.back() == LorenzPoint{1.0, 1.0});
        for (std::size_t k = 1; k <= n; ++k) {
            const auto& prev = curve.points[k - 1];
            const auto& cur = curve.points[k];
            REQUIRE(cur.population > prev.population);
            REQUIRE(cur.wealth >= prev.wealth);
            REQUIRE(cur.wealth <= cur.population + 1e-12);
            if (k >= 2) {
                const double slope_prev = prev.wealth - curve.points[k - 2].wealth;
                REQUIRE(cur.wealth - prev.wealth >= slope_prev - 1e-12);
            }
        }
        const double g = *gini(w);
        REQUIRE(std::abs(curve.area_gini() - g) <= 1.0 / static_cast<double>(n) + 1e-9);
        REQUIRE(std::abs(oracle::gini_lorenz_trapezoid(w) - g) <= 1.0 / static_cast<double>(n) + 1e-9);
    }
}

TEST_CASE("measure bundles every metric") {
    const std::vector<double> w{0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 4.0, 4.0, 6.0, 20.0};
    const auto r = *measure(w, 1e-7);
    CHECK(r.gini == doctest::Approx(*gini(w)).epsilon(1e-15));
    CHECK(r.gini_excl_zwa == doctest::Approx(*gini_excluding_zwa(w, 1e-7)).epsilon(1e-15));
    CHECK(r.zero_wealth_fraction == 0.2);
    CHECK(r.top1_share == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.top10_share == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.bottom90_share == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_FALSE(measure(std::vector<double>{0.0, 0.0}, 1e-7).has_value());
}
