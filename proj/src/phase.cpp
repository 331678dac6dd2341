#include "desync/phase.hpp"

#include <cmath>
#include <string>

namespace desync
{
    PhaseAngle PhaseAngle::canonicalize(double raw)
    {
        if (!std::isfinite(raw))
            throw std::invalid_argument("phase must be finite, got " + std::to_string(raw));
        double r = std::fmod(raw, kTwoPi);
        if (r < 0.0)
            r += kTwoPi;
        // A tiny negative remainder plus 2*pi can round up onto the wrap point.
        if (r >= kTwoPi)
            r = 0.0;
        return PhaseAngle(r);
    }

    double operator-(PhaseAngle a, PhaseAngle b)
    {
        return PhaseAngle::canonicalize(a.value_ - b.value_).value();
    }

    double forward_diff(PhaseAngle a, PhaseAngle b) { return a - b; }

    PrcConfig::PrcConfig(int n, double l) : n_(n), l_(l), slot_(0.0)
    {
        if (n < 2)
            throw std::invalid_argument("network size n must be >= 2");
        if (!(l > 0.0 && l < 1.0))
            throw std::invalid_argument("coupling l must lie in the open interval (0, 1)");
        slot_ = kTwoPi / static_cast<double>(n);
    }

    PrcConfig PrcConfig::with_inverted_response(int n, double l)
    {
        PrcConfig cfg(n, l);
        cfg.inverted_ = true;
        return cfg;
    }

    double prc_response(PhaseAngle phi, const PrcConfig &cfg)
    {
        const double p = phi.value();
        if (!cfg.in_effective_interval(p))
            return 0.0;
        const double shift = cfg.l() * (cfg.slot() - p);
        return cfg.inverted() ? -shift : shift;
    }

    PhaseAngle apply_prc(PhaseAngle phi, const PrcConfig &cfg)
    {
        const double p = phi.value();
        if (!cfg.in_effective_interval(p))
            return phi;
        if (cfg.inverted())
            return canonicalize(p - cfg.l() * (cfg.slot() - p));

        // slot - (1-l)(slot - p) keeps the distance to slot accurate; the
        // algebraically equal (1-l)p + l*slot loses it near the boundary.
        double next = cfg.slot() - (1.0 - cfg.l()) * (cfg.slot() - p);
        if (next >= cfg.slot())
            next = std::nextafter(cfg.slot(), 0.0);
        return canonicalize(next);
    }

} // namespace desync
