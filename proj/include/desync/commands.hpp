#pragma once

// The three CLI subcommands as library calls, so tests can drive them
// without spawning processes.

#include "desync/scenario.hpp"
#include "desync/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace desync
{
    enum class ExitCode : int
    {
        Success = 0,
        NotConverged = 1,
        InvalidInput = 2,
        InvariantViolation = 3,
        IoError = 4,
    };

    struct RunCommand
    {
        std::filesystem::path config;
        std::optional<std::filesystem::path> out; // no trace written when absent
        TraceFormat format = TraceFormat::Table;
        bool summary = false;
    };

    ExitCode cmd_run(const RunCommand &cmd, std::ostream &out, std::ostream &err);

    /// Grid of scenarios. JSON schema:
    ///
    ///   {
    ///     "schema_version": 1,
    ///     "n_values": [3, 4, 5],
    ///     "l_values": [0.1, 0.5, 0.85],
    ///     "seeds": [1, 2, 3],
    ///     "omega": 6.283185307179586,       // optional, default 2*pi
    ///     "max_events": 4000,               // optional, default 200*n per cell
    ///     "p_threshold": 1e-6,              // optional, default 1e-6
    ///     "sustain_events": 5               // optional, default n
    ///   }
    ///
    /// Every cell starts from distinct uniform-random phases.
    struct SweepSpec
    {
        std::vector<int> n_values;
        std::vector<double> l_values;
        std::vector<std::uint64_t> seeds;
        double omega = kTwoPi;
        std::optional<std::int64_t> max_events;
        std::optional<double> p_threshold = kConvergenceThreshold;
        int sustain = 0;
    };

    /// Throws ConfigError with a JSON pointer to the offending field.
    SweepSpec parse_sweep(std::string_view text);

    /// The run configuration of one grid cell.
    ScenarioConfig sweep_cell_config(const SweepSpec &spec, int n, double l, std::uint64_t seed);

    /// File name of a cell's trace, unique per (n, l, seed).
    std::string sweep_trace_name(int n, double l, std::uint64_t seed, TraceFormat format);

    struct SweepCommand
    {
        std::filesystem::path spec;
        std::filesystem::path out_dir;
        TraceFormat format = TraceFormat::Table;
        unsigned jobs = 0; // 0 = hardware concurrency
    };

    /// Writes one trace per cell plus summary.csv. Cell failures land in the
    /// summary's error column; the exit code is the worst cell outcome.
    ExitCode cmd_sweep(const SweepCommand &cmd, std::ostream &out, std::ostream &err);

    struct VerifyCommand
    {
        int seeds = 1000;
        std::optional<std::filesystem::path> out; // JSON report
        bool inject_inverted_prc = false;
    };

    ExitCode cmd_verify(const VerifyCommand &cmd, std::ostream &out, std::ostream &err);

} // namespace desync
