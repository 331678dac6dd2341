#pragma once

// Circle arithmetic on S^1 and the desynchronization phase response.
//
// The effective interval is [0, slot) with slot = 2*pi/n. A listener inside
// it is pulled toward slot by the fraction l; anything at or beyond slot is
// left alone.

#include <numbers>
#include <stdexcept>

namespace desync
{
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

    /// A point on the unit circle, stored as its representative in [0, 2*pi).
    class PhaseAngle
    {
    public:
        constexpr PhaseAngle() = default;

        /// Throws std::invalid_argument for NaN or infinite input.
        static PhaseAngle canonicalize(double raw);

        constexpr double value() const { return value_; }

        friend PhaseAngle operator+(PhaseAngle a, double radians) { return canonicalize(a.value_ + radians); }
        /// Forward circular difference, always in [0, 2*pi).
        friend double operator-(PhaseAngle a, PhaseAngle b);

        friend constexpr bool operator==(PhaseAngle, PhaseAngle) = default;
        friend constexpr auto operator<=>(PhaseAngle, PhaseAngle) = default;

    private:
        explicit constexpr PhaseAngle(double v) : value_(v) {}
        double value_ = 0.0;
    };

    inline PhaseAngle canonicalize(double raw) { return PhaseAngle::canonicalize(raw); }

    /// (a - b) mod 2*pi.
    double forward_diff(PhaseAngle a, PhaseAngle b);

    /// Parameters of the response function: network size n and coupling l.
    ///
    /// The slot width 2*pi/n is computed once here; the classifier and the
    /// update both read this same constant.
    class PrcConfig
    {
    public:
        /// Throws std::invalid_argument unless n >= 2 and 0 < l < 1.
        PrcConfig(int n, double l);

        /// Fault injection for the verifier's negative control: the response
        /// is negated, which lets listeners overtake one another. Never use
        /// this outside of tests.
        static PrcConfig with_inverted_response(int n, double l);

        int n() const { return n_; }
        double l() const { return l_; }
        double slot() const { return slot_; }
        bool inverted() const { return inverted_; }

        bool in_effective_interval(double phase) const { return phase < slot_; }

    private:
        int n_;
        double l_;
        double slot_;
        bool inverted_ = false;
    };

    /// The phase shift F(phi): -l*(phi - slot) inside the effective interval,
    /// zero elsewhere (including exactly at slot).
    double prc_response(PhaseAngle phi, const PrcConfig &cfg);

    /// phi + F(phi). Inside the effective interval the result is
    /// (1-l)*phi + l*slot and stays strictly below slot; outside it is phi
    /// unchanged, bit for bit.
    PhaseAngle apply_prc(PhaseAngle phi, const PrcConfig &cfg);

} // namespace desync
