#include "desync/trace.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

namespace desync
{
    namespace
    {
        using ojson = nlohmann::ordered_json;

        std::string real(double x) { return fmt::format("{:.17g}", x); }

        PulseKind parse_kind(std::string_view s, std::int64_t record)
        {
            if (s == "Active")
                return PulseKind::Active;
            if (s == "Silent")
                return PulseKind::Silent;
            if (s == "Collision")
                return PulseKind::Collision;
            throw TraceIoError(record, "unknown pulse kind '" + std::string(s) + "'");
        }

        template <typename T>
        T parse_number(std::string_view s, std::int64_t record)
        {
            T value{};
            const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
            if (ec != std::errc() || end != s.data() + s.size())
                throw TraceIoError(record, "malformed number '" + std::string(s) + "'");
            return value;
        }

        std::vector<std::string_view> split(std::string_view line, char sep)
        {
            std::vector<std::string_view> out;
            std::size_t start = 0;
            while (true)
            {
                const std::size_t pos = line.find(sep, start);
                out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }

        std::string table_header(int n)
        {
            std::string h = "event_index,time,firers,kind";
            for (int i = 0; i < n; ++i)
                h += fmt::format(",phase_{}", i);
            for (int i = 0; i < n; ++i)
                h += fmt::format(",delta_{}", i);
            h += ",p_after,predicted_dp";
            return h;
        }

        std::string table_row(const TraceRecord &r)
        {
            std::string row = fmt::format("{},{},", r.event_index, real(r.time));
            for (std::size_t i = 0; i < r.firers.size(); ++i)
                row += (i ? ";" : "") + std::to_string(r.firers[i]);
            row += ',';
            row += to_string(r.kind);
            for (double p : r.phases_after)
                row += ',' + real(p);
            for (double d : r.deltas_after)
                row += ',' + real(d);
            row += ',' + real(r.p_after) + ',';
            if (r.predicted_dp)
                row += real(*r.predicted_dp);
            return row;
        }

        std::string object_line(const TraceRecord &r)
        {
            ojson o;
            o["event_index"] = r.event_index;
            o["time"] = r.time;
            o["firers"] = r.firers;
            o["kind"] = std::string(to_string(r.kind));
            o["phases_after"] = r.phases_after;
            o["deltas_after"] = r.deltas_after;
            o["p_after"] = r.p_after;
            if (r.predicted_dp)
                o["predicted_dp"] = *r.predicted_dp;
            else
                o["predicted_dp"] = nullptr;
            return o.dump();
        }

        std::vector<TraceRecord> parse_table(std::istream &in)
        {
            std::vector<TraceRecord> out;
            std::string line;
            if (!std::getline(in, line))
                throw TraceIoError(-1, "missing table header");
            const auto header = split(line, ',');
            if (header.size() < 6 || (header.size() - 6) % 2 != 0)
                throw TraceIoError(-1, "malformed table header");
            const std::size_t n = (header.size() - 6) / 2;
            if (line != table_header(static_cast<int>(n)))
                throw TraceIoError(-1, "unexpected table header");

            while (std::getline(in, line))
            {
                if (line.empty())
                    continue;
                const auto record = static_cast<std::int64_t>(out.size());
                const auto cells = split(line, ',');
                if (cells.size() != header.size())
                    throw TraceIoError(record, "expected " + std::to_string(header.size()) + " columns");
                TraceRecord r;
                r.event_index = parse_number<std::int64_t>(cells[0], record);
                r.time = parse_number<double>(cells[1], record);
                if (!cells[2].empty())
                {
                    for (std::string_view id : split(cells[2], ';'))
                        r.firers.push_back(parse_number<int>(id, record));
                }
                r.kind = parse_kind(cells[3], record);
                for (std::size_t i = 0; i < n; ++i)
                    r.phases_after.push_back(parse_number<double>(cells[4 + i], record));
                for (std::size_t i = 0; i < n; ++i)
                    r.deltas_after.push_back(parse_number<double>(cells[4 + n + i], record));
                r.p_after = parse_number<double>(cells[4 + 2 * n], record);
                if (!cells[5 + 2 * n].empty())
                    r.predicted_dp = parse_number<double>(cells[5 + 2 * n], record);
                out.push_back(std::move(r));
            }
            return out;
        }

        std::vector<TraceRecord> parse_objects(std::istream &in)
        {
            std::vector<TraceRecord> out;
            std::string line;
            while (std::getline(in, line))
            {
                if (line.empty())
                    continue;
                const auto record = static_cast<std::int64_t>(out.size());
                try
                {
                    const ojson o = ojson::parse(line);
                    TraceRecord r;
                    r.event_index = o.at("event_index").get<std::int64_t>();
                    r.time = o.at("time").get<double>();
                    r.firers = o.at("firers").get<std::vector<int>>();
                    r.kind = parse_kind(o.at("kind").get<std::string>(), record);
                    r.phases_after = o.at("phases_after").get<std::vector<double>>();
                    r.deltas_after = o.at("deltas_after").get<std::vector<double>>();
                    r.p_after = o.at("p_after").get<double>();
                    if (const ojson &dp = o.at("predicted_dp"); !dp.is_null())
                        r.predicted_dp = dp.get<double>();
                    out.push_back(std::move(r));
                }
                catch (const ojson::exception &e)
                {
                    throw TraceIoError(record, std::string("malformed trace object: ") + e.what());
                }
            }
            return out;
        }
    } // namespace

    TraceRecord make_trace_record(const PulseEvent &event, const EventMetrics &metrics, int n)
    {
        TraceRecord r;
        r.event_index = metrics.index;
        r.time = event.time;
        for (OscillatorId id : event.firers)
            r.firers.push_back(id.index);
        r.kind = event.kind;
        r.phases_after = event.phases_after(n);
        r.deltas_after = metrics.deltas_after.values;
        r.p_after = metrics.p_after;
        r.predicted_dp = metrics.predicted_dp;
        return r;
    }

    std::vector<TraceRecord> make_trace(const RunResult &result)
    {
        std::vector<TraceRecord> out;
        out.reserve(result.events.size());
        for (std::size_t i = 0; i < result.events.size(); ++i)
            out.push_back(make_trace_record(result.events[i], result.metrics[i], result.final_state.size()));
        return out;
    }

    TraceFormat parse_trace_format(std::string_view name)
    {
        if (name == "table")
            return TraceFormat::Table;
        if (name == "objects")
            return TraceFormat::Objects;
        throw std::invalid_argument("unknown trace format '" + std::string(name) + "' (expected table or objects)");
    }

    TraceWriter::TraceWriter(std::ostream &out, TraceFormat format, int n) : out_(out), format_(format), n_(n)
    {
        if (format_ == TraceFormat::Table)
        {
            out_ << table_header(n_) << '\n';
            if (!out_)
                throw TraceIoError(-1, "failed writing trace header");
        }
    }

    void TraceWriter::write(const TraceRecord &record)
    {
        if (record.phases_after.size() != static_cast<std::size_t>(n_) ||
            record.deltas_after.size() != static_cast<std::size_t>(n_))
            throw TraceIoError(written_, "record width does not match the trace");
        out_ << (format_ == TraceFormat::Table ? table_row(record) : object_line(record)) << '\n';
        if (!out_)
            throw TraceIoError(written_, "failed writing trace record " + std::to_string(written_));
        ++written_;
    }

    void write_trace(std::span<const TraceRecord> records, std::ostream &out, TraceFormat format, int n)
    {
        TraceWriter writer(out, format, n);
        for (const TraceRecord &r : records)
            writer.write(r);
        out.flush();
        if (!out)
            throw TraceIoError(static_cast<std::int64_t>(records.size()) - 1, "failed flushing trace");
    }

    std::vector<TraceRecord> parse_trace(std::istream &in, TraceFormat format)
    {
        return format == TraceFormat::Table ? parse_table(in) : parse_objects(in);
    }

} // namespace desync
