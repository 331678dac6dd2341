#include "desync/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace desync
{
    std::string_view to_string(PulseKind kind)
    {
        switch (kind)
        {
        case PulseKind::Active:
            return "Active";
        case PulseKind::Silent:
            return "Silent";
        case PulseKind::Collision:
            return "Collision";
        }
        return "?";
    }

    std::vector<double> PulseEvent::phases_before(int n) const
    {
        std::vector<double> out(static_cast<std::size_t>(n), 0.0);
        for (const PhaseUpdate &u : updates)
            out[static_cast<std::size_t>(u.id.index)] = u.before;
        return out;
    }

    std::vector<double> PulseEvent::phases_after(int n) const
    {
        std::vector<double> out(static_cast<std::size_t>(n), 0.0);
        for (const PhaseUpdate &u : updates)
            out[static_cast<std::size_t>(u.id.index)] = u.after;
        for (const PhaseReset &r : resets)
            out[static_cast<std::size_t>(r.id.index)] = r.value;
        return out;
    }

    double uniform_phase(std::mt19937_64 &rng)
    {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return canonicalize(unit * kTwoPi).value();
    }

    NetworkState::NetworkState(PrcConfig prc, double omega, std::vector<double> phases, std::uint64_t seed)
        : NetworkState(prc, omega, std::move(phases), std::mt19937_64(seed))
    {
    }

    NetworkState::NetworkState(PrcConfig prc, double omega, std::vector<double> phases, std::mt19937_64 rng)
        : prc_(prc), omega_(omega), phases_(std::move(phases)), rng_(rng)
    {
        if (!(omega_ > 0.0) || !std::isfinite(omega_))
            throw std::invalid_argument("omega must be a positive finite frequency");
        if (phases_.size() != static_cast<std::size_t>(prc_.n()))
            throw std::invalid_argument("expected " + std::to_string(prc_.n()) + " phases, got " +
                                        std::to_string(phases_.size()));
        for (double p : phases_)
        {
            if (!(p >= 0.0 && p < kTwoPi))
                throw std::invalid_argument("phase " + std::to_string(p) + " outside [0, 2*pi)");
        }
    }

    double NetworkState::draw_phase() { return uniform_phase(rng_); }

} // namespace desync
