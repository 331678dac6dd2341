#pragma once

// Trace persistence. Two line formats carry the same records:
//
//   table   - comma-separated with a header row:
//             event_index,time,firers,kind,phase_0..phase_{n-1},
//             delta_0..delta_{n-1},p_after,predicted_dp
//             Firers are ';'-joined ids, predicted_dp is empty for collisions.
//   objects - one JSON object per line with the TraceRecord field names.
//
// Reals are written with 17 significant digits (or the shortest exact form),
// so parsing a trace reproduces every double bit for bit.

#include "desync/engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace desync
{
    struct TraceRecord
    {
        std::int64_t event_index = 0;
        double time = 0.0;
        std::vector<int> firers;
        PulseKind kind = PulseKind::Silent;
        std::vector<double> phases_after;
        std::vector<double> deltas_after;
        double p_after = 0.0;
        std::optional<double> predicted_dp;

        friend bool operator==(const TraceRecord &, const TraceRecord &) = default;
    };

    TraceRecord make_trace_record(const PulseEvent &event, const EventMetrics &metrics, int n);
    std::vector<TraceRecord> make_trace(const RunResult &result);

    enum class TraceFormat : std::uint8_t
    {
        Table,
        Objects,
    };

    /// Throws std::invalid_argument for anything but "table" or "objects".
    TraceFormat parse_trace_format(std::string_view name);

    class TraceIoError : public std::runtime_error
    {
    public:
        TraceIoError(std::int64_t record, const std::string &message)
            : std::runtime_error(message), record_(record)
        {
        }

        /// Index of the record being written or read, -1 for the header.
        std::int64_t record() const { return record_; }

    private:
        std::int64_t record_;
    };

    /// Streams records to one sink. The table header goes out on construction.
    class TraceWriter
    {
    public:
        TraceWriter(std::ostream &out, TraceFormat format, int n);

        void write(const TraceRecord &record);

    private:
        std::ostream &out_;
        TraceFormat format_;
        int n_;
        std::int64_t written_ = 0;
    };

    void write_trace(std::span<const TraceRecord> records, std::ostream &out, TraceFormat format, int n);

    /// Throws TraceIoError on malformed input.
    std::vector<TraceRecord> parse_trace(std::istream &in, TraceFormat format);

} // namespace desync
