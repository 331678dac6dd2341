#include "desync/commands.hpp"

#include "desync/verify.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace desync
{
    namespace
    {
        using nlohmann::json;

        std::string read_file(const std::filesystem::path &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw ConfigError("", "cannot open " + path.string());
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        }

        void write_trace_file(const std::filesystem::path &path, const RunResult &result, TraceFormat format)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw TraceIoError(-1, "cannot open " + path.string() + " for writing");
            write_trace(make_trace(result), out, format, result.final_state.size());
        }

        std::string real(double x) { return fmt::format("{:.17g}", x); }

        const json &require(const json &doc, const char *key)
        {
            auto it = doc.find(key);
            if (it == doc.end())
                throw ConfigError(std::string("/") + key, "missing required field");
            return *it;
        }

        template <typename T>
        std::vector<T> nonempty_list(const json &doc, const char *key)
        {
            const json &v = require(doc, key);
            const std::string field = std::string("/") + key;
            if (!v.is_array() || v.empty())
                throw ConfigError(field, "expected a non-empty array");
            std::vector<T> out;
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                const json &x = v[i];
                const std::string at = field + "/" + std::to_string(i);
                if constexpr (std::is_same_v<T, double>)
                {
                    if (!x.is_number() || !std::isfinite(x.get<double>()))
                        throw ConfigError(at, "expected a finite number");
                    out.push_back(x.get<double>());
                }
                else if constexpr (std::is_same_v<T, std::uint64_t>)
                {
                    if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0))
                        throw ConfigError(at, "expected a non-negative integer");
                    out.push_back(x.get<std::uint64_t>());
                }
                else
                {
                    if (!x.is_number_integer())
                        throw ConfigError(at, "expected an integer");
                    out.push_back(x.get<T>());
                }
            }
            return out;
        }

        const std::vector<std::string> kSweepFields = {"schema_version", "n_values", "l_values", "seeds",
                                                       "omega", "max_events", "p_threshold", "sustain_events"};

        struct CellOutcome
        {
            int n = 0;
            double l = 0.0;
            std::uint64_t seed = 0;
            std::string trace;
            ExitCode status = ExitCode::Success;
            bool converged = false;
            std::int64_t events = 0;
            std::optional<std::int64_t> events_to_converge;
            double final_p = 0.0;
            std::string error;
        };

        std::string csv_safe(std::string s)
        {
            std::replace(s.begin(), s.end(), ',', ';');
            std::replace(s.begin(), s.end(), '\n', ' ');
            return s;
        }
    } // namespace

    ExitCode cmd_run(const RunCommand &cmd, std::ostream &out, std::ostream &err)
    {
        ScenarioConfig config;
        try
        {
            config = load_config(cmd.config);
        }
        catch (const ConfigError &e)
        {
            err << "invalid config: " << e.what() << '\n';
            return ExitCode::InvalidInput;
        }

        const auto started = std::chrono::steady_clock::now();
        std::optional<RunResult> result;
        try
        {
            result = run(make_initial_state(config), config.stop);
        }
        catch (const InvariantViolation &e)
        {
            err << "internal invariant violated: " << e.what() << '\n';
            return ExitCode::InvariantViolation;
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        if (cmd.out)
        {
            try
            {
                write_trace_file(*cmd.out, *result, cmd.format);
            }
            catch (const TraceIoError &e)
            {
                err << "trace output failed at record " << e.record() << ": " << e.what() << '\n';
                return ExitCode::IoError;
            }
        }

        if (cmd.summary)
        {
            out << "final_p=" << real(result->final_p()) << '\n'
                << "events=" << result->events.size() << '\n'
                << "wall_time_s=" << fmt::format("{:.6f}", wall) << '\n'
                << "converged=" << (result->converged() ? "yes" : "no") << '\n';
        }
        return result->converged() ? ExitCode::Success : ExitCode::NotConverged;
    }

    SweepSpec parse_sweep(std::string_view text)
    {
        json doc;
        try
        {
            doc = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("", std::string("malformed JSON: ") + e.what());
        }
        if (!doc.is_object())
            throw ConfigError("", "sweep spec must be a JSON object");
        for (const auto &[key, value] : doc.items())
        {
            if (std::find(kSweepFields.begin(), kSweepFields.end(), key) == kSweepFields.end())
                throw ConfigError("/" + key, "unknown field");
        }
        const json &version = require(doc, "schema_version");
        if (!version.is_number_integer() || version.get<std::int64_t>() != kConfigSchemaVersion)
            throw ConfigError("/schema_version", "unsupported schema version");

        SweepSpec spec;
        spec.n_values = nonempty_list<int>(doc, "n_values");
        for (std::size_t i = 0; i < spec.n_values.size(); ++i)
        {
            if (spec.n_values[i] < 2)
                throw ConfigError("/n_values/" + std::to_string(i), "network size must be >= 2");
        }
        spec.l_values = nonempty_list<double>(doc, "l_values");
        for (std::size_t i = 0; i < spec.l_values.size(); ++i)
        {
            if (!(spec.l_values[i] > 0.0 && spec.l_values[i] < 1.0))
                throw ConfigError("/l_values/" + std::to_string(i), "coupling must lie in (0, 1)");
        }
        spec.seeds = nonempty_list<std::uint64_t>(doc, "seeds");

        if (auto it = doc.find("omega"); it != doc.end())
        {
            if (!it->is_number() || !(it->get<double>() > 0.0) || !std::isfinite(it->get<double>()))
                throw ConfigError("/omega", "natural frequency must be a positive number");
            spec.omega = it->get<double>();
        }
        if (auto it = doc.find("max_events"); it != doc.end())
        {
            if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
                throw ConfigError("/max_events", "must be a non-negative integer");
            spec.max_events = it->get<std::int64_t>();
        }
        if (auto it = doc.find("p_threshold"); it != doc.end())
        {
            if (it->is_null())
                spec.p_threshold.reset();
            else if (!it->is_number() || !(it->get<double>() >= 0.0))
                throw ConfigError("/p_threshold", "must be a non-negative number or null");
            else
                spec.p_threshold = it->get<double>();
        }
        if (auto it = doc.find("sustain_events"); it != doc.end())
        {
            if (!it->is_number_integer() || it->get<std::int64_t>() < 1)
                throw ConfigError("/sustain_events", "must be a positive integer");
            spec.sustain = it->get<int>();
        }
        return spec;
    }

    ScenarioConfig sweep_cell_config(const SweepSpec &spec, int n, double l, std::uint64_t seed)
    {
        ScenarioConfig cfg;
        cfg.n = n;
        cfg.l = l;
        cfg.omega = spec.omega;
        cfg.initial.generator = PhaseGenerator::UniformRandom;
        cfg.seed = seed;
        cfg.stop = StopCondition::defaults(n);
        if (spec.max_events)
            cfg.stop.max_events = *spec.max_events;
        cfg.stop.p_threshold = spec.p_threshold;
        cfg.stop.sustain = spec.sustain;
        return cfg;
    }

    std::string sweep_trace_name(int n, double l, std::uint64_t seed, TraceFormat format)
    {
        return fmt::format("trace_n{}_l{}_seed{}.{}", n, l, seed, format == TraceFormat::Table ? "csv" : "jsonl");
    }

    ExitCode cmd_sweep(const SweepCommand &cmd, std::ostream &out, std::ostream &err)
    {
        SweepSpec spec;
        try
        {
            spec = parse_sweep(read_file(cmd.spec));
        }
        catch (const ConfigError &e)
        {
            err << "invalid sweep spec: " << e.what() << '\n';
            return ExitCode::InvalidInput;
        }

        std::error_code ec;
        std::filesystem::create_directories(cmd.out_dir, ec);
        if (ec)
        {
            err << "cannot create " << cmd.out_dir.string() << ": " << ec.message() << '\n';
            return ExitCode::IoError;
        }

        std::vector<CellOutcome> cells;
        for (int n : spec.n_values)
        {
            for (double l : spec.l_values)
            {
                for (std::uint64_t seed : spec.seeds)
                {
                    CellOutcome c;
                    c.n = n;
                    c.l = l;
                    c.seed = seed;
                    c.trace = sweep_trace_name(n, l, seed, cmd.format);
                    cells.push_back(std::move(c));
                }
            }
        }

        // Each worker owns its engine and output file; only the cell index is shared.
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < cells.size(); i = next++)
            {
                CellOutcome &c = cells[i];
                try
                {
                    const ScenarioConfig cfg = sweep_cell_config(spec, c.n, c.l, c.seed);
                    const RunResult result = run(make_initial_state(cfg), cfg.stop);
                    write_trace_file(cmd.out_dir / c.trace, result, cmd.format);
                    c.converged = result.converged();
                    c.events = static_cast<std::int64_t>(result.events.size());
                    c.events_to_converge = result.events_to_converge;
                    c.final_p = result.final_p();
                    c.status = c.converged ? ExitCode::Success : ExitCode::NotConverged;
                }
                catch (const InvariantViolation &e)
                {
                    c.status = ExitCode::InvariantViolation;
                    c.error = e.what();
                }
                catch (const TraceIoError &e)
                {
                    c.status = ExitCode::IoError;
                    c.error = e.what();
                }
                catch (const std::exception &e)
                {
                    c.status = ExitCode::InvalidInput;
                    c.error = e.what();
                }
            }
        };
        unsigned jobs = cmd.jobs ? cmd.jobs : std::max(1u, std::thread::hardware_concurrency());
        jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cells.size()));
        {
            std::vector<std::jthread> pool;
            for (unsigned j = 1; j < jobs; ++j)
                pool.emplace_back(worker);
            worker();
        }

        const std::filesystem::path summary_path = cmd.out_dir / "summary.csv";
        std::ofstream summary(summary_path, std::ios::binary | std::ios::trunc);
        summary << "n,l,seed,converged,events,events_to_converge,final_p,trace,error\n";
        ExitCode worst = ExitCode::Success;
        int converged = 0;
        for (const CellOutcome &c : cells)
        {
            summary << c.n << ',' << fmt::format("{}", c.l) << ',' << c.seed << ',' << (c.converged ? "yes" : "no")
                    << ',' << c.events << ','
                    << (c.events_to_converge ? std::to_string(*c.events_to_converge) : std::string()) << ','
                    << real(c.final_p) << ',' << c.trace << ',' << csv_safe(c.error) << '\n';
            worst = std::max(worst, c.status);
            converged += c.converged ? 1 : 0;
        }
        summary.flush();
        if (!summary)
        {
            err << "failed writing " << summary_path.string() << '\n';
            return ExitCode::IoError;
        }
        out << "cells=" << cells.size() << " converged=" << converged << " summary=" << summary_path.string()
            << '\n';
        return worst;
    }

    ExitCode cmd_verify(const VerifyCommand &cmd, std::ostream &out, std::ostream &err)
    {
        if (cmd.seeds < 0)
        {
            err << "seed count must be non-negative\n";
            return ExitCode::InvalidInput;
        }
        VerifyOptions options;
        options.seeds = cmd.seeds;
        options.identical_phase_runs = std::max(1, cmd.seeds / 10);
        options.inject_inverted_prc = cmd.inject_inverted_prc;
        const VerifyReport report = run_verification(options);

        for (const PropertyResult &p : report.properties)
        {
            out << (p.passed() ? "PASS " : "FAIL ") << p.name << " (" << p.checks << " checks";
            if (!p.passed())
                out << ", " << p.failures << " failures";
            out << ")\n";
            if (p.first_failure)
            {
                const Counterexample &c = *p.first_failure;
                out << "     seed=" << c.seed << " n=" << c.n << " l=" << fmt::format("{}", c.l)
                    << " event=" << c.event_index << ": " << c.detail << '\n';
            }
        }
        out << "events:";
        for (const auto &[name, count] : report.event_counts)
            out << ' ' << name << '=' << count;
        out << '\n';

        if (cmd.out)
        {
            std::ofstream file(*cmd.out, std::ios::binary | std::ios::trunc);
            file << report.to_json() << '\n';
            if (!file)
            {
                err << "failed writing report " << cmd.out->string() << '\n';
                return ExitCode::IoError;
            }
        }
        return report.all_passed() ? ExitCode::Success : ExitCode::InvariantViolation;
    }

} // namespace desync
