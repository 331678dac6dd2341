#include "doctest.h"
#include "support.hpp"

#include "desync/phase.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace desync;

namespace
{
    constexpr double pi = std::numbers::pi;

    doctest::Approx near(double x) { return doctest::Approx(x).epsilon(1e-14); }
} // namespace

TEST_CASE("canonicalize wraps onto [0, 2pi)")
{
    CHECK(canonicalize(0.0).value() == 0.0);
    CHECK(canonicalize(kTwoPi).value() == 0.0);
    CHECK(canonicalize(-pi / 2).value() == near(3 * pi / 2));
    CHECK(canonicalize(5 * pi).value() == near(pi));
    CHECK(canonicalize(-1e-300).value() < kTwoPi);
    CHECK_THROWS_AS(canonicalize(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK_THROWS_AS(canonicalize(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("forward difference goes counter-clockwise")
{
    CHECK(forward_diff(canonicalize(1.0), canonicalize(0.5)) == near(0.5));
    CHECK(forward_diff(canonicalize(0.5), canonicalize(1.0)) == near(kTwoPi - 0.5));
    CHECK(forward_diff(canonicalize(2.0), canonicalize(2.0)) == 0.0);
    CHECK((canonicalize(0.1) - canonicalize(6.0)) == near(0.1 + kTwoPi - 6.0));
}

TEST_CASE("config rejects out of range parameters")
{
    CHECK_THROWS_AS(PrcConfig(1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(PrcConfig(5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PrcConfig(5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PrcConfig(5, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    const PrcConfig cfg(4, 0.5);
    CHECK(cfg.slot() == near(pi / 2));
    CHECK(cfg.in_effective_interval(0.0));
    CHECK_FALSE(cfg.in_effective_interval(cfg.slot()));
}

TEST_CASE("response values")
{
    const PrcConfig cfg(5, 0.85);
    CHECK(prc_response(canonicalize(0.0), cfg) == near(1.0681415022205296));
    CHECK(prc_response(canonicalize(cfg.slot()), cfg) == 0.0);
    CHECK(prc_response(canonicalize(pi), cfg) == 0.0);
    CHECK(prc_response(canonicalize(1.0), cfg) == near(0.85 * (cfg.slot() - 1.0)));
}

TEST_CASE("apply_prc pulls toward the slot boundary")
{
    const PrcConfig cfg(3, 0.85);
    CHECK(apply_prc(canonicalize(0.5), cfg).value() == near(1.855235837034216));
    CHECK(apply_prc(canonicalize(3.0), cfg).value() == 3.0);
    CHECK(apply_prc(canonicalize(0.0), cfg).value() < cfg.slot());
    CHECK(apply_prc(canonicalize(std::nextafter(cfg.slot(), 0.0)), cfg).value() < cfg.slot());
}

TEST_CASE("apply_prc laws over fuzzed inputs")
{
    std::mt19937_64 rng(11);
    for (int n : {2, 3, 5, 8, 17})
    {
        for (double l : {0.01, 0.1, 0.5, 0.85, 0.99})
        {
            const PrcConfig cfg(n, l);
            for (int i = 0; i < 500; ++i)
            {
                const double a = uniform_phase(rng);
                const double b = uniform_phase(rng);
                const double fa = apply_prc(canonicalize(a), cfg).value();
                const double fb = apply_prc(canonicalize(b), cfg).value();
                if (a < cfg.slot())
                {
                    REQUIRE(fa >= a);
                    REQUIRE(fa < cfg.slot());
                    REQUIRE(std::abs(cfg.slot() - fa) <= std::abs(cfg.slot() - a));
                }
                else
                {
                    REQUIRE(fa == a);
                }
                // order preserving
                if (a < b)
                    REQUIRE(fa <= fb);
            }
        }
    }
}

TEST_CASE("inverted response pushes away from the slot")
{
    const PrcConfig cfg = PrcConfig::with_inverted_response(3, 0.5);
    CHECK(cfg.inverted());
    CHECK(apply_prc(canonicalize(1.0), cfg).value() < 1.0);
}
