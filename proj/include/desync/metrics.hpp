#pragma once

// Desynchronization measurement: neighbour differences, the index P, pulse
// classification and the closed-form change of P across a single pulse.

#include "desync/network.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace desync
{
    /// P at or below this counts as desynchronized.
    inline constexpr double kConvergenceThreshold = 1e-6;

    /// Ring order: ids sorted by descending phase, ties by ascending id.
    /// deltas[k] is the gap from ring[k+1] forward to ring[k].
    using RingOrder = std::vector<OscillatorId>;

    RingOrder ring_order(std::span<const double> phases);

    struct DeltaVector
    {
        std::vector<double> values;

        std::size_t size() const { return values.size(); }
        double operator[](std::size_t k) const { return values[k]; }
        double sum() const;
    };

    /// Forward differences between ring neighbours, wrap term last.
    ///
    /// When every phase is identical the wrap term is the full circle 2*pi,
    /// so the gaps still sum to 2*pi. Throws std::invalid_argument on an
    /// empty list.
    DeltaVector compute_deltas(std::span<const PhaseAngle> ordered);
    DeltaVector compute_deltas(std::span<const double> phases, const RingOrder &ring);

    /// P = sum |delta_k - 2*pi/n|. Throws std::invalid_argument when the
    /// vector length differs from cfg.n().
    double compute_p(const DeltaVector &deltas, const PrcConfig &cfg);

    enum class ActiveCase : std::uint8_t
    {
        Case1, // trailing gap above slot before and at/above slot after
        Case2, // trailing gap above slot before, below slot after
        Case3, // trailing gap at/below slot before
        Case4, // at/below before, at/above after: unreachable with a correct PRC
    };

    std::string_view to_string(ActiveCase c);

    struct PulseClassification
    {
        PulseKind kind = PulseKind::Silent; // Active or Silent only
        int m = 0;                          // listeners inside the effective interval
        std::optional<ActiveCase> active_case;

        // The gap behind the furthest listener inside the effective
        // interval, i.e. between it and the next oscillator ahead of it.
        // Zero for silent pulses.
        double trailing_before = 0.0;
        double trailing_after = 0.0;
        // Before-phase of the furthest listener inside the effective interval.
        double lead_listener = 0.0;
    };

    /// Throws std::invalid_argument for collision events.
    PulseClassification classify_pulse(const PulseEvent &event, const PrcConfig &cfg);

    /// Closed-form P+ - P for a single-firer pulse, from the recorded
    /// before-phases only:
    ///   Case1: 2l(phi_lead - slot)
    ///   Case2: 2(slot - trailing_before)
    ///   Case3, silent: 0
    /// Throws std::invalid_argument for collision events.
    double predict_delta_p(const PulseEvent &event, const PrcConfig &cfg);

    /// Everything measured about one event.
    struct EventMetrics
    {
        std::int64_t index = 0;
        PulseKind kind = PulseKind::Silent;
        double p_before = 0.0;
        double p_after = 0.0;
        DeltaVector deltas_after;
        std::optional<PulseClassification> classification; // absent for collisions
        std::optional<double> predicted_dp;                 // absent for collisions
    };

    /// Follows a run event by event, keeping the ring order frozen between
    /// collisions and recomputing it right after each one.
    class DesyncMonitor
    {
    public:
        DesyncMonitor(PrcConfig cfg, std::span<const double> initial_phases);

        EventMetrics observe(const PulseEvent &event);

        double p() const { return p_; }
        const RingOrder &ring() const { return ring_; }
        const DeltaVector &deltas() const { return deltas_; }

    private:
        PrcConfig cfg_;
        RingOrder ring_;
        DeltaVector deltas_;
        double p_ = 0.0;
        std::int64_t next_index_ = 0;
    };

    /// Longest streak of consecutive silent pulses among events that happened
    /// while P (before the event) was still above `threshold`. Any other event
    /// ends the streak.
    int silent_run_length(std::span<const EventMetrics> events, double threshold = kConvergenceThreshold);

} // namespace desync
