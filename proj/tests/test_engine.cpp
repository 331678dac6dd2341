#include "doctest.h"
#include "support.hpp"

#include "desync/engine.hpp"
#include "desync/scenario.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace desync;

namespace
{
    constexpr double pi = std::numbers::pi;

    doctest::Approx near(double x) { return doctest::Approx(x).epsilon(1e-12); }

    NetworkState make(int n, double l, std::vector<double> phases, std::uint64_t seed = 1)
    {
        return NetworkState(PrcConfig(n, l), kTwoPi, std::move(phases), seed);
    }
} // namespace

TEST_CASE("state construction validates")
{
    CHECK_THROWS_AS(make(3, 0.5, {0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(make(2, 0.5, {0.1, kTwoPi}), std::invalid_argument);
    CHECK_THROWS_AS(make(2, 0.5, {-0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(NetworkState(PrcConfig(2, 0.5), 0.0, {0.1, 0.2}, 1), std::invalid_argument);
}

TEST_CASE("time to next fire")
{
    CHECK(time_to_next_fire(make(2, 0.5, {3 * pi / 2, pi})) == near(0.25));
    CHECK(time_to_next_fire(make(2, 0.5, {0.0, pi})) == near(0.5));
    CHECK(time_to_next_fire(make(2, 0.5, {kTwoPi - 1e-12, 1.0})) > 0.0);
    const NetworkState slow(PrcConfig(2, 0.5), pi, {pi, 0.0}, 1);
    CHECK(time_to_next_fire(slow) == near(1.0));
}

TEST_CASE("advance translates every phase")
{
    const NetworkState s = advance(make(3, 0.5, {1.0, 2.0, 3.0}), 0.1);
    CHECK(s.phase({0}) == near(1.0 + 0.1 * kTwoPi));
    CHECK(s.phase({2}) == near(3.0 + 0.1 * kTwoPi));
    CHECK(s.time() == near(0.1));

    const NetworkState start = make(3, 0.5, {1.0, 2.0, 3.0});
    const NetworkState full = advance(start, time_to_next_fire(start));
    CHECK(full.phase({2}) == kTwoPi);
    CHECK(full.phase({1}) < kTwoPi);

    CHECK_THROWS_AS(advance(start, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(advance(start, time_to_next_fire(start) * 1.5), std::invalid_argument);
}

TEST_CASE("fire without a leader at the wrap point is a defect")
{
    CHECK_THROWS_AS(fire(make(3, 0.5, {1.0, 2.0, 3.0})), InvariantViolation);
}

TEST_CASE("single firer pulls a listener in the effective interval")
{
    auto [s, e] = step(make(3, 0.85, {kTwoPi - 0.5, 0.5, 2.5}));
    CHECK(e.kind == PulseKind::Active);
    REQUIRE(e.firers.size() == 1);
    CHECK(e.firers[0] == OscillatorId{0});
    CHECK(s.phase({0}) == 0.0);
    CHECK(s.phase({1}) == near(1.9302358370342159));
    CHECK(s.phase({2}) == near(3.0));
    CHECK(e.updates.size() == 2);
    CHECK(e.time == near(0.5 / kTwoPi));
}

TEST_CASE("no listener in the effective interval gives a silent pulse")
{
    auto [s, e] = step(make(3, 0.5, {kTwoPi - 0.1, 2.1, 3.9}));
    CHECK(e.kind == PulseKind::Silent);
    CHECK(s.phase({1}) == near(2.2));
    CHECK(s.phase({2}) == near(4.0));
    CHECK(s.phase({0}) == 0.0);
}

TEST_CASE("simultaneous firers reset randomly and reproducibly")
{
    auto [s1, e1] = step(make(2, 0.5, {pi, pi}, 77));
    auto [s2, e2] = step(make(2, 0.5, {pi, pi}, 77));
    CHECK(e1.kind == PulseKind::Collision);
    CHECK(e1.firers.size() == 2);
    CHECK(e1.resets.size() == 2);
    CHECK(s1.phase({0}) != s1.phase({1}));
    CHECK(s1.phase({0}) == s2.phase({0}));
    CHECK(s1.phase({1}) == s2.phase({1}));
    for (double p : s1.phases())
    {
        CHECK(p >= 0.0);
        CHECK(p < kTwoPi);
    }
    auto [s3, e3] = step(make(2, 0.5, {pi, pi}, 78));
    CHECK(s3.phase({0}) != s1.phase({0}));
}

TEST_CASE("collision listeners take one response per firer")
{
    const PrcConfig cfg(3, 0.5);
    auto [s, e] = step(make(3, 0.5, {5.0, 5.0, 0.2}, 3));
    CHECK(e.kind == PulseKind::Collision);
    const double once = apply_prc(canonicalize(e.updates[0].before), cfg).value();
    const double twice = apply_prc(canonicalize(once), cfg).value();
    CHECK(s.phase({2}) == twice);
}

TEST_CASE("n distinct firers in n steps")
{
    std::mt19937_64 rng(5);
    NetworkState s = make(5, 0.85, testing::random_phases(5, rng));
    std::set<int> seen;
    for (int i = 0; i < 5; ++i)
    {
        auto [next, e] = step(std::move(s));
        s = std::move(next);
        seen.insert(e.firers.at(0).index);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("run respects the event budget")
{
    std::mt19937_64 rng(9);
    const NetworkState s = make(4, 0.5, testing::random_phases(4, rng));
    StopCondition one{1, std::nullopt, 0};
    const RunResult r = run(s, one);
    CHECK(r.events.size() == 1);
    CHECK(r.metrics.size() == 1);
    CHECK_FALSE(r.converged());

    const RunResult full = run(s, StopCondition::defaults(4));
    CHECK(full.converged());
    CHECK(full.final_p() <= kConvergenceThreshold);
    REQUIRE(full.events_to_converge);
    CHECK(*full.events_to_converge <= static_cast<std::int64_t>(full.events.size()));
}

TEST_CASE("runs are deterministic and gaps cover the circle")
{
    std::mt19937_64 rng(21);
    const NetworkState s = make(6, 0.3, testing::random_phases(6, rng), 4);
    const RunResult a = run(s, StopCondition::defaults(6));
    const RunResult b = run(s, StopCondition::defaults(6));
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i)
    {
        CHECK(a.events[i].time == b.events[i].time);
        CHECK(a.metrics[i].p_after == b.metrics[i].p_after);
        CHECK(a.metrics[i].deltas_after.sum() == near(kTwoPi));
    }
    for (int i = 0; i < 6; ++i)
        CHECK(a.final_state.phase({i}) == b.final_state.phase({i}));
}

TEST_CASE("identical start separates through collision resets")
{
    ScenarioConfig cfg;
    cfg.n = 5;
    cfg.l = 0.85;
    cfg.omega = kTwoPi;
    cfg.initial.generator = PhaseGenerator::AllEqual;
    cfg.initial.value = pi;
    cfg.seed = 3;
    StopCondition stop = StopCondition::defaults(5);
    stop.max_events *= 10;
    stop.p_threshold = 1e-3;
    const RunResult r = run(make_initial_state(cfg), stop);
    CHECK(r.events.front().kind == PulseKind::Collision);
    CHECK(r.converged());
}
