#pragma once

// Property suite over seeded runs: the PRC laws, the engine's ordering and
// bookkeeping guarantees, and the metric identities that tie the closed-form
// change of P to the simulated one.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace desync
{
    struct VerifyOptions
    {
        int seeds = 1000;
        std::vector<int> n_values{2, 3, 5, 8};
        std::vector<double> l_values{0.1, 0.5, 0.85, 0.99};
        /// Runs from all-equal initial phases, exercising collision resets.
        int identical_phase_runs = 100;
        /// Samples per (n, l) cell for the PRC laws.
        int fuzz_samples = 2000;
        std::uint64_t fuzz_seed = 0x5eed;
        /// Negative control: negate the response everywhere.
        bool inject_inverted_prc = false;
    };

    struct Counterexample
    {
        std::uint64_t seed = 0;
        int n = 0;
        double l = 0.0;
        std::int64_t event_index = -1; // -1 when not tied to an event
        std::string detail;
    };

    struct PropertyResult
    {
        std::string name;
        std::int64_t checks = 0;
        std::int64_t failures = 0;
        std::optional<Counterexample> first_failure;

        bool passed() const { return failures == 0; }
    };

    struct VerifyReport
    {
        std::vector<PropertyResult> properties;
        /// Case1, Case2, Case3, Case4, Silent, Collision.
        std::map<std::string, std::int64_t> event_counts;
        int runs = 0;

        bool all_passed() const;
        std::string to_json() const;
    };

    VerifyReport run_verification(const VerifyOptions &options);

} // namespace desync
