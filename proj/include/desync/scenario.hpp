#pragma once

// Scenario configuration: a single flat JSON object.
//
//   {
//     "schema_version": 1,
//     "n": 5,
//     "l": 0.85,
//     "omega": 6.283185307179586,
//     "initial_phases": "uniform_random",   // or "evenly_spaced", "all_equal",
//                                           // or an explicit array of n radians
//     "phase_value": 3.141592653589793,     // required with "all_equal" only
//     "seed": 42,
//     "max_events": 1000,                   // optional, default 200*n
//     "p_threshold": 1e-6,                  // optional, default 1e-6, null disables
//     "sustain_events": 5                   // optional, default n
//   }
//
// Angles are radians throughout.

#include "desync/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace desync
{
    inline constexpr int kConfigSchemaVersion = 1;

    /// Rejected configuration. `field()` is a JSON pointer to the offending
    /// value ("/l", "/initial_phases/3"), or "" when the document itself is
    /// malformed.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(std::string field, const std::string &message)
            : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field))
        {
        }

        const std::string &field() const { return field_; }

    private:
        std::string field_;
    };

    enum class PhaseGenerator : std::uint8_t
    {
        Explicit,
        UniformRandom,
        AllEqual,
        EvenlySpaced,
    };

    struct InitialPhases
    {
        PhaseGenerator generator = PhaseGenerator::UniformRandom;
        std::vector<double> values; // Explicit only
        double value = 0.0;         // AllEqual only
    };

    struct ScenarioConfig
    {
        int n = 0;
        double l = 0.0;
        double omega = 0.0;
        InitialPhases initial;
        std::uint64_t seed = 0;
        StopCondition stop;
    };

    ScenarioConfig parse_config(std::string_view text);
    /// Throws ConfigError with an empty field when the file cannot be read.
    ScenarioConfig load_config(const std::filesystem::path &path);
    std::string dump_config(const ScenarioConfig &config);

    /// Draws `n` uniform phases, redrawing exact duplicates.
    std::vector<double> distinct_uniform_phases(int n, std::mt19937_64 &rng);

    /// Builds the t=0 state. Random generators draw from a generator seeded
    /// with config.seed, which the state then keeps for collision resets.
    NetworkState make_initial_state(const ScenarioConfig &config);

} // namespace desync
