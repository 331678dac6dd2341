#include "desync/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace desync
{
    namespace
    {
        using nlohmann::json;

        const json &require(const json &doc, const char *key)
        {
            auto it = doc.find(key);
            if (it == doc.end())
                throw ConfigError(std::string("/") + key, "missing required field");
            return *it;
        }

        double finite_number(const json &v, const std::string &field)
        {
            if (!v.is_number())
                throw ConfigError(field, "expected a number");
            const double x = v.get<double>();
            if (!std::isfinite(x))
                throw ConfigError(field, "expected a finite number");
            return x;
        }

        std::int64_t integer(const json &v, const std::string &field)
        {
            if (!v.is_number_integer())
                throw ConfigError(field, "expected an integer");
            return v.get<std::int64_t>();
        }

        double phase_in_range(const json &v, const std::string &field)
        {
            const double x = finite_number(v, field);
            if (!(x >= 0.0 && x < kTwoPi))
                throw ConfigError(field, "phase must lie in [0, 2*pi)");
            return x;
        }

        const std::set<std::string> kKnownFields = {"schema_version", "n", "l", "omega", "initial_phases",
                                                    "phase_value", "seed", "max_events", "p_threshold",
                                                    "sustain_events"};
    } // namespace

    ScenarioConfig parse_config(std::string_view text)
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
            throw ConfigError("", "configuration must be a JSON object");
        for (const auto &[key, value] : doc.items())
        {
            if (!kKnownFields.contains(key))
                throw ConfigError("/" + key, "unknown field");
        }

        const std::int64_t version = integer(require(doc, "schema_version"), "/schema_version");
        if (version != kConfigSchemaVersion)
            throw ConfigError("/schema_version", "unsupported schema version " + std::to_string(version));

        ScenarioConfig cfg;
        const std::int64_t n = integer(require(doc, "n"), "/n");
        if (n < 2 || n > 1'000'000)
            throw ConfigError("/n", "network size must be between 2 and 1000000");
        cfg.n = static_cast<int>(n);

        cfg.l = finite_number(require(doc, "l"), "/l");
        if (!(cfg.l > 0.0 && cfg.l < 1.0))
            throw ConfigError("/l", "coupling must lie in the open interval (0, 1)");

        cfg.omega = finite_number(require(doc, "omega"), "/omega");
        if (!(cfg.omega > 0.0))
            throw ConfigError("/omega", "natural frequency must be positive");

        const json &seed = require(doc, "seed");
        if (seed.is_number_unsigned())
            cfg.seed = seed.get<std::uint64_t>();
        else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0)
            cfg.seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
        else
            throw ConfigError("/seed", "seed must be a non-negative 64-bit integer");

        const json &init = require(doc, "initial_phases");
        const bool has_value = doc.contains("phase_value");
        if (init.is_array())
        {
            if (init.size() != static_cast<std::size_t>(cfg.n))
                throw ConfigError("/initial_phases", "expected " + std::to_string(cfg.n) + " phases, got " +
                                                         std::to_string(init.size()));
            cfg.initial.generator = PhaseGenerator::Explicit;
            for (std::size_t i = 0; i < init.size(); ++i)
                cfg.initial.values.push_back(phase_in_range(init[i], "/initial_phases/" + std::to_string(i)));
        }
        else if (init.is_string())
        {
            const std::string name = init.get<std::string>();
            if (name == "uniform_random")
                cfg.initial.generator = PhaseGenerator::UniformRandom;
            else if (name == "evenly_spaced")
                cfg.initial.generator = PhaseGenerator::EvenlySpaced;
            else if (name == "all_equal")
                cfg.initial.generator = PhaseGenerator::AllEqual;
            else
                throw ConfigError("/initial_phases", "unknown generator '" + name + "'");
        }
        else
        {
            throw ConfigError("/initial_phases", "expected a generator name or an array of phases");
        }

        if (cfg.initial.generator == PhaseGenerator::AllEqual)
        {
            if (!has_value)
                throw ConfigError("/phase_value", "missing required field for all_equal");
            cfg.initial.value = phase_in_range(doc["phase_value"], "/phase_value");
        }
        else if (has_value)
        {
            throw ConfigError("/phase_value", "only meaningful with the all_equal generator");
        }

        cfg.stop = StopCondition::defaults(cfg.n);
        if (auto it = doc.find("max_events"); it != doc.end())
        {
            cfg.stop.max_events = integer(*it, "/max_events");
            if (cfg.stop.max_events < 0)
                throw ConfigError("/max_events", "must be non-negative");
        }
        if (auto it = doc.find("p_threshold"); it != doc.end())
        {
            if (it->is_null())
            {
                cfg.stop.p_threshold.reset();
            }
            else
            {
                const double thr = finite_number(*it, "/p_threshold");
                if (thr < 0.0)
                    throw ConfigError("/p_threshold", "must be non-negative");
                cfg.stop.p_threshold = thr;
            }
        }
        if (auto it = doc.find("sustain_events"); it != doc.end())
        {
            const std::int64_t s = integer(*it, "/sustain_events");
            if (s < 1 || s > 1'000'000)
                throw ConfigError("/sustain_events", "must be between 1 and 1000000");
            cfg.stop.sustain = static_cast<int>(s);
        }
        return cfg;
    }

    ScenarioConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("", "cannot open " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_config(buf.str());
    }

    std::string dump_config(const ScenarioConfig &config)
    {
        nlohmann::ordered_json doc;
        doc["schema_version"] = kConfigSchemaVersion;
        doc["n"] = config.n;
        doc["l"] = config.l;
        doc["omega"] = config.omega;
        switch (config.initial.generator)
        {
        case PhaseGenerator::Explicit:
            doc["initial_phases"] = config.initial.values;
            break;
        case PhaseGenerator::UniformRandom:
            doc["initial_phases"] = "uniform_random";
            break;
        case PhaseGenerator::EvenlySpaced:
            doc["initial_phases"] = "evenly_spaced";
            break;
        case PhaseGenerator::AllEqual:
            doc["initial_phases"] = "all_equal";
            doc["phase_value"] = config.initial.value;
            break;
        }
        doc["seed"] = config.seed;
        doc["max_events"] = config.stop.max_events;
        if (config.stop.p_threshold)
            doc["p_threshold"] = *config.stop.p_threshold;
        else
            doc["p_threshold"] = nullptr;
        if (config.stop.sustain > 0)
            doc["sustain_events"] = config.stop.sustain;
        return doc.dump(2);
    }

    std::vector<double> distinct_uniform_phases(int n, std::mt19937_64 &rng)
    {
        std::vector<double> phases;
        phases.reserve(static_cast<std::size_t>(n));
        while (phases.size() < static_cast<std::size_t>(n))
        {
            const double v = uniform_phase(rng);
            if (std::find(phases.begin(), phases.end(), v) == phases.end())
                phases.push_back(v);
        }
        return phases;
    }

    NetworkState make_initial_state(const ScenarioConfig &config)
    {
        const PrcConfig prc(config.n, config.l);
        std::mt19937_64 rng(config.seed);
        std::vector<double> phases;
        switch (config.initial.generator)
        {
        case PhaseGenerator::Explicit:
            phases = config.initial.values;
            break;
        case PhaseGenerator::UniformRandom:
            phases = distinct_uniform_phases(config.n, rng);
            break;
        case PhaseGenerator::AllEqual:
            phases.assign(static_cast<std::size_t>(config.n), config.initial.value);
            break;
        case PhaseGenerator::EvenlySpaced:
            for (int k = 0; k < config.n; ++k)
                phases.push_back(static_cast<double>(k) * prc.slot());
            break;
        }
        return NetworkState(prc, config.omega, std::move(phases), rng);
    }

} // namespace desync
