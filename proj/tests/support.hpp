#pragma once

#include "desync/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace desync::testing
{
    inline std::vector<double> random_phases(int n, std::mt19937_64 &rng)
    {
        std::vector<double> out;
        for (int i = 0; i < n; ++i)
            out.push_back(uniform_phase(rng));
        return out;
    }

    // Brute force P: sort, diff, wrap. Independent of the ring bookkeeping.
    inline double brute_p(std::vector<double> phases, int n)
    {
        std::sort(phases.begin(), phases.end());
        const double slot = kTwoPi / n;
        double p = 0.0;
        bool all_equal = true;
        for (std::size_t i = 1; i < phases.size(); ++i)
        {
            p += std::abs((phases[i] - phases[i - 1]) - slot);
            all_equal = all_equal && phases[i] == phases[0];
        }
        const double wrap = all_equal ? kTwoPi : phases.front() + kTwoPi - phases.back();
        return p + std::abs(wrap - slot);
    }
} // namespace desync::testing
