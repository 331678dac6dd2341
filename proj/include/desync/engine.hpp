#pragma once

// Exact event-driven evolution: phases move in closed form between pulses, so
// the only work is finding the next firing instant and applying the pulse.

#include "desync/metrics.hpp"
#include "desync/network.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace desync
{
    /// An engine invariant failed. Signals a defect, never bad input.
    class InvariantViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    /// Seconds until the leading oscillator reaches 2*pi: (2*pi - max)/omega.
    double time_to_next_fire(const NetworkState &state);

    /// Moves every phase forward by omega*dt. When dt equals
    /// time_to_next_fire the leading oscillators land exactly on 2*pi.
    /// Throws std::invalid_argument for negative dt or dt past the next fire.
    NetworkState advance(NetworkState state, double dt);

    /// Handles the pulse(s) of oscillators sitting at 2*pi.
    ///
    /// A lone firer resets to 0 and every listener applies the PRC once.
    /// Several firers at the same instant each reset to an independent
    /// uniform draw (ascending id order; a draw equal to an earlier one is
    /// redrawn), and each listener applies the PRC once per firer, ascending
    /// id. Throws InvariantViolation when nobody is at the wrap point.
    std::pair<NetworkState, PulseEvent> fire(NetworkState state);

    /// advance(state, time_to_next_fire(state)) followed by fire.
    std::pair<NetworkState, PulseEvent> step(NetworkState state);

    struct StopCondition
    {
        std::int64_t max_events = 0;
        /// Stop once P stays at or below this for `sustain` consecutive events.
        std::optional<double> p_threshold;
        /// Consecutive events needed; 0 means "use the network size".
        int sustain = 0;

        /// 200*n events, P <= 1e-6.
        static StopCondition defaults(int n);
    };

    enum class StopReason : std::uint8_t
    {
        Converged,
        EventBudget,
    };

    struct RunResult
    {
        NetworkState final_state;
        std::vector<PulseEvent> events;
        std::vector<EventMetrics> metrics; // parallel to events
        double initial_p = 0.0;
        StopReason reason = StopReason::EventBudget;
        /// 1-based index of the first event of the converged streak.
        std::optional<std::int64_t> events_to_converge;

        bool converged() const { return reason == StopReason::Converged; }
        double final_p() const { return metrics.empty() ? initial_p : metrics.back().p_after; }
    };

    /// Steps until the stop condition is met. Deterministic for a given
    /// initial state (including its generator) and stop condition.
    RunResult run(NetworkState state, const StopCondition &stop);

} // namespace desync
