#include "desync/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace desync
{
    struct EngineAccess
    {
        static std::vector<double> &phases(NetworkState &s) { return s.phases_; }
        static double &time(NetworkState &s) { return s.time_; }
    };

    namespace
    {
        const double kBelowWrap = std::nextafter(kTwoPi, 0.0);

        double max_phase(std::span<const double> phases) { return *std::max_element(phases.begin(), phases.end()); }
    } // namespace

    double time_to_next_fire(const NetworkState &state)
    {
        return (kTwoPi - max_phase(state.phases())) / state.omega();
    }

    NetworkState advance(NetworkState state, double dt)
    {
        if (!(dt >= 0.0) || !std::isfinite(dt))
            throw std::invalid_argument("advance: dt must be finite and non-negative");
        const double limit = time_to_next_fire(state);
        if (dt > limit)
            throw std::invalid_argument("advance: dt " + std::to_string(dt) + " s skips the firing due in " +
                                        std::to_string(limit) + " s");

        std::vector<double> &phases = EngineAccess::phases(state);
        if (dt == limit)
        {
            // Leaders land on the wrap point exactly; everyone else is
            // translated by the same angle and kept strictly short of it.
            const double lead = max_phase(phases);
            const double shift = kTwoPi - lead;
            for (double &p : phases)
                p = (p == lead) ? kTwoPi : std::min(p + shift, kBelowWrap);
        }
        else
        {
            const double shift = state.omega() * dt;
            for (double &p : phases)
                p = std::min(p + shift, kBelowWrap);
        }
        EngineAccess::time(state) += dt;
        return state;
    }

    std::pair<NetworkState, PulseEvent> fire(NetworkState state)
    {
        std::vector<double> &phases = EngineAccess::phases(state);
        const PrcConfig &prc = state.prc();

        PulseEvent event;
        event.time = state.time();
        for (std::size_t i = 0; i < phases.size(); ++i)
        {
            if (phases[i] == kTwoPi)
                event.firers.push_back(OscillatorId{static_cast<int>(i)});
        }
        if (event.firers.empty())
            throw InvariantViolation("fire: no oscillator is at the wrap point");

        const std::size_t pulses = event.firers.size();
        bool active = false;
        for (std::size_t i = 0; i < phases.size(); ++i)
        {
            if (phases[i] == kTwoPi)
                continue;
            const double before = phases[i];
            PhaseAngle p = canonicalize(before);
            for (std::size_t k = 0; k < pulses; ++k)
                p = apply_prc(p, prc);
            const double after = p.value();
            if (!prc.inverted() && prc.in_effective_interval(before) && !(after < prc.slot()))
                throw InvariantViolation("fire: listener " + std::to_string(i) + " pushed out of the effective interval");
            active = active || prc.in_effective_interval(before);
            event.updates.push_back(PhaseUpdate{OscillatorId{static_cast<int>(i)}, before, after});
            phases[i] = after;
        }

        // Resets take effect after every listener update of the instant.
        if (pulses == 1)
        {
            event.resets.push_back(PhaseReset{event.firers.front(), 0.0});
        }
        else
        {
            for (OscillatorId id : event.firers)
            {
                double v = state.draw_phase();
                auto taken = [&](double x) {
                    return std::any_of(event.resets.begin(), event.resets.end(),
                                       [x](const PhaseReset &r) { return r.value == x; });
                };
                while (taken(v))
                    v = state.draw_phase();
                event.resets.push_back(PhaseReset{id, v});
            }
        }
        for (const PhaseReset &r : event.resets)
            phases[static_cast<std::size_t>(r.id.index)] = r.value;

        if (pulses > 1)
            event.kind = PulseKind::Collision;
        else
            event.kind = active ? PulseKind::Active : PulseKind::Silent;
        return {std::move(state), std::move(event)};
    }

    std::pair<NetworkState, PulseEvent> step(NetworkState state)
    {
        const double dt = time_to_next_fire(state);
        return fire(advance(std::move(state), dt));
    }

    StopCondition StopCondition::defaults(int n)
    {
        StopCondition stop;
        stop.max_events = 200 * static_cast<std::int64_t>(n);
        stop.p_threshold = kConvergenceThreshold;
        return stop;
    }

    RunResult run(NetworkState state, const StopCondition &stop)
    {
        DesyncMonitor monitor(state.prc(), state.phases());
        const double initial_p = monitor.p();
        const int sustain = stop.sustain > 0 ? stop.sustain : state.size();

        std::vector<PulseEvent> events;
        std::vector<EventMetrics> metrics;
        StopReason reason = StopReason::EventBudget;
        std::optional<std::int64_t> streak_start;
        int streak = 0;

        for (std::int64_t count = 0; count < stop.max_events; ++count)
        {
            auto [next, event] = step(std::move(state));
            state = std::move(next);
            EventMetrics m = monitor.observe(event);

            if (stop.p_threshold && m.p_after <= *stop.p_threshold)
            {
                if (streak++ == 0)
                    streak_start = count + 1;
            }
            else
            {
                streak = 0;
                streak_start.reset();
            }
            events.push_back(std::move(event));
            metrics.push_back(std::move(m));

            if (stop.p_threshold && streak >= sustain)
            {
                reason = StopReason::Converged;
                break;
            }
        }

        RunResult result{std::move(state), std::move(events), std::move(metrics), initial_p, reason, std::nullopt};
        if (reason == StopReason::Converged)
            result.events_to_converge = streak_start;
        return result;
    }

} // namespace desync
