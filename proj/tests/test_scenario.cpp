#include "doctest.h"

#include "desync/scenario.hpp"

#include <numbers>
#include <set>

using namespace desync;

namespace
{
    std::string base(const std::string &extra = "", const std::string &init = R"("uniform_random")")
    {
        return R"({"schema_version": 1, "n": 5, "l": 0.85, "omega": 6.283185307179586, "seed": 42, "initial_phases": )" +
               init + extra + "}";
    }

    std::string field_of(const std::string &text)
    {
        try
        {
            parse_config(text);
        }
        catch (const ConfigError &e)
        {
            return e.field();
        }
        return "<accepted>";
    }
} // namespace

TEST_CASE("parses a random scenario with defaults")
{
    const ScenarioConfig cfg = parse_config(base());
    CHECK(cfg.n == 5);
    CHECK(cfg.l == 0.85);
    CHECK(cfg.omega == kTwoPi);
    CHECK(cfg.seed == 42);
    CHECK(cfg.initial.generator == PhaseGenerator::UniformRandom);
    CHECK(cfg.stop.max_events == 1000);
    REQUIRE(cfg.stop.p_threshold);
    CHECK(*cfg.stop.p_threshold == 1e-6);
}

TEST_CASE("generators")
{
    const ScenarioConfig eq = parse_config(base(R"(, "phase_value": 3.141592653589793)", R"("all_equal")"));
    CHECK(eq.initial.generator == PhaseGenerator::AllEqual);
    const NetworkState s = make_initial_state(eq);
    for (double p : s.phases())
        CHECK(p == std::numbers::pi);

    const NetworkState even = make_initial_state(parse_config(base("", R"("evenly_spaced")")));
    for (int k = 0; k < 5; ++k)
        CHECK(even.phase({k}) == doctest::Approx(k * kTwoPi / 5));

    const ScenarioConfig ex = parse_config(base("", "[0.1, 0.2, 0.3, 0.4, 0.5]"));
    CHECK(ex.initial.values.size() == 5);
    CHECK(make_initial_state(ex).phase({3}) == 0.4);

    const ScenarioConfig rnd = parse_config(base());
    const NetworkState a = make_initial_state(rnd);
    const NetworkState b = make_initial_state(rnd);
    std::set<double> distinct(a.phases().begin(), a.phases().end());
    CHECK(distinct.size() == 5);
    for (int k = 0; k < 5; ++k)
        CHECK(a.phase({k}) == b.phase({k}));
}

TEST_CASE("rejections name the field")
{
    CHECK(field_of(R"({"schema_version": 1, "n": 5, "l": 1.0, "omega": 1, "seed": 1, "initial_phases": "uniform_random"})") == "/l");
    CHECK(field_of(R"({"schema_version": 1, "l": 0.5, "omega": 1, "seed": 1, "initial_phases": "uniform_random"})") == "/n");
    CHECK(field_of(base("", "[0.1, 0.2]")) == "/initial_phases");
    CHECK(field_of(base("", "[0.1, 0.2, 0.3, 7.0, 0.5]")) == "/initial_phases/3");
    CHECK(field_of(base(R"(, "colour": "red")")) == "/colour");
    CHECK(field_of(base("", R"("all_equal")")) == "/phase_value");
    CHECK(field_of(base("", R"("spiral")")) == "/initial_phases");
    CHECK(field_of(base(R"(, "max_events": -1)")) == "/max_events");
    CHECK(field_of(R"({"schema_version": 2})") == "/schema_version");
    CHECK(field_of("{not json") == "");
    CHECK(field_of("[1, 2]") == "");
    CHECK(field_of(base(R"(, "p_threshold": null)")) == "<accepted>");
    CHECK(field_of(base(R"(, "max_events": 0)")) == "<accepted>");
}

TEST_CASE("dump then parse is the identity")
{
    const ScenarioConfig cfg = parse_config(base(R"(, "max_events": 77, "sustain_events": 3, "p_threshold": null)"));
    const ScenarioConfig back = parse_config(dump_config(cfg));
    CHECK(back.n == cfg.n);
    CHECK(back.l == cfg.l);
    CHECK(back.seed == cfg.seed);
    CHECK(back.stop.max_events == 77);
    CHECK(back.stop.sustain == 3);
    CHECK_FALSE(back.stop.p_threshold);
}

TEST_CASE("missing file")
{
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}
