#pragma once

#include "desync/phase.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace desync
{
    /// Index of an oscillator in [0, n). Stable for the lifetime of a run.
    struct OscillatorId
    {
        int index = 0;

        friend constexpr bool operator==(OscillatorId, OscillatorId) = default;
        friend constexpr auto operator<=>(OscillatorId, OscillatorId) = default;
    };

    enum class PulseKind : std::uint8_t
    {
        Active,
        Silent,
        Collision,
    };

    std::string_view to_string(PulseKind kind);

    struct PhaseUpdate
    {
        OscillatorId id;
        double before = 0.0;
        double after = 0.0;
    };

    struct PhaseReset
    {
        OscillatorId id;
        double value = 0.0;
    };

    /// One firing instant. Firers were at the wrap point (2*pi); every other
    /// oscillator appears in `updates` exactly once, with its phase just
    /// before and just after all pulses of the instant.
    struct PulseEvent
    {
        double time = 0.0;
        std::vector<OscillatorId> firers;
        std::vector<PhaseUpdate> updates;
        std::vector<PhaseReset> resets;
        PulseKind kind = PulseKind::Silent;

        bool single_firer() const { return firers.size() == 1; }

        /// Phases of every oscillator at the instant, before any pulse is
        /// applied, indexed by id. Firers read as 0 (the wrap point).
        std::vector<double> phases_before(int n) const;
        /// Phases of every oscillator once the instant is complete.
        std::vector<double> phases_after(int n) const;
    };

    /// The population at one moment in time.
    ///
    /// Phases lie in [0, 2*pi). Between a maximal advance and the matching
    /// fire, the oscillators about to fire hold exactly 2*pi; no other code
    /// path produces that value.
    class NetworkState
    {
    public:
        /// Throws std::invalid_argument on a length mismatch, an out-of-range
        /// phase or a non-positive omega.
        NetworkState(PrcConfig prc, double omega, std::vector<double> phases, std::uint64_t seed);
        NetworkState(PrcConfig prc, double omega, std::vector<double> phases, std::mt19937_64 rng);

        double time() const { return time_; }
        double omega() const { return omega_; }
        const PrcConfig &prc() const { return prc_; }
        int size() const { return prc_.n(); }
        std::span<const double> phases() const { return phases_; }
        double phase(OscillatorId id) const { return phases_[static_cast<std::size_t>(id.index)]; }

        /// A uniform draw in [0, 2*pi) from the state's generator. Uses the
        /// top 53 bits of one 64-bit output so the stream is identical on
        /// every standard library.
        double draw_phase();

    private:
        friend struct EngineAccess;

        PrcConfig prc_;
        double omega_;
        double time_ = 0.0;
        std::vector<double> phases_;
        std::mt19937_64 rng_;
    };

    /// Uniform draw in [0, 2*pi) using the same mapping as NetworkState.
    double uniform_phase(std::mt19937_64 &rng);

} // namespace desync
