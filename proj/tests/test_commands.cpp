#include "doctest.h"

#include "desync/commands.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace desync;
namespace fs = std::filesystem;

namespace
{
    struct TempDir
    {
        fs::path path;
        TempDir()
        {
            static int counter = 0;
            path = fs::temp_directory_path() / ("desync_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
            fs::create_directories(path);
        }
        ~TempDir() { fs::remove_all(path); }
    };

    void write_file(const fs::path &p, const std::string &text)
    {
        std::ofstream(p) << text;
    }

    std::string read_file(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    const char *kConfig = R"({"schema_version": 1, "n": 4, "l": 0.5, "omega": 6.283185307179586,
                             "initial_phases": "uniform_random", "seed": 9})";
} // namespace

TEST_CASE("run twice, same bytes")
{
    TempDir dir;
    write_file(dir.path / "cfg.json", kConfig);
    for (TraceFormat fmt : {TraceFormat::Table, TraceFormat::Objects})
    {
        std::ostringstream out, err;
        CHECK(cmd_run({dir.path / "cfg.json", dir.path / "a", fmt, true}, out, err) == ExitCode::Success);
        CHECK(out.str().find("converged=yes") != std::string::npos);
        CHECK(cmd_run({dir.path / "cfg.json", dir.path / "b", fmt, false}, out, err) == ExitCode::Success);
        const std::string a = read_file(dir.path / "a");
        CHECK_FALSE(a.empty());
        CHECK(a == read_file(dir.path / "b"));
    }
}

TEST_CASE("zero budget does not converge")
{
    TempDir dir;
    write_file(dir.path / "cfg.json", R"({"schema_version": 1, "n": 4, "l": 0.5, "omega": 1.0,
        "initial_phases": "uniform_random", "seed": 9, "max_events": 0})");
    std::ostringstream out, err;
    CHECK(cmd_run({dir.path / "cfg.json", dir.path / "t.csv", TraceFormat::Table, false}, out, err) ==
          ExitCode::NotConverged);
    const std::string trace = read_file(dir.path / "t.csv");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 1);
}

TEST_CASE("invalid input and unwritable output")
{
    TempDir dir;
    write_file(dir.path / "bad.json", R"({"schema_version": 1, "n": 4, "l": 1.5})");
    std::ostringstream out, err;
    CHECK(cmd_run({dir.path / "bad.json", std::nullopt, TraceFormat::Table, false}, out, err) == ExitCode::InvalidInput);
    CHECK(err.str().find("/l") != std::string::npos);
    CHECK(cmd_run({dir.path / "missing.json", std::nullopt, TraceFormat::Table, false}, out, err) ==
          ExitCode::InvalidInput);
    write_file(dir.path / "cfg.json", kConfig);
    CHECK(cmd_run({dir.path / "cfg.json", dir.path / "no" / "such" / "dir" / "t.csv", TraceFormat::Table, false}, out,
                  err) == ExitCode::IoError);
}

TEST_CASE("sweep cells match single runs")
{
    TempDir dir;
    write_file(dir.path / "grid.json", R"({"schema_version": 1, "n_values": [3, 4], "l_values": [0.5], "seeds": [9, 10]})");
    std::ostringstream out, err;
    CHECK(cmd_sweep({dir.path / "grid.json", dir.path / "out", TraceFormat::Table, 2}, out, err) == ExitCode::Success);
    const std::string summary = read_file(dir.path / "out" / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 5);

    write_file(dir.path / "cfg.json", kConfig);
    CHECK(cmd_run({dir.path / "cfg.json", dir.path / "single.csv", TraceFormat::Table, false}, out, err) ==
          ExitCode::Success);
    CHECK(read_file(dir.path / "out" / sweep_trace_name(4, 0.5, 9, TraceFormat::Table)) ==
          read_file(dir.path / "single.csv"));

    write_file(dir.path / "bad.json", R"({"schema_version": 1, "n_values": [1], "l_values": [0.5], "seeds": [1]})");
    CHECK(cmd_sweep({dir.path / "bad.json", dir.path / "out2", TraceFormat::Table, 1}, out, err) ==
          ExitCode::InvalidInput);
}

TEST_CASE("sweep cell names are distinct")
{
    CHECK(sweep_trace_name(5, 0.85, 3, TraceFormat::Table) != sweep_trace_name(5, 0.5, 3, TraceFormat::Table));
    CHECK(sweep_trace_name(5, 0.85, 3, TraceFormat::Objects).ends_with(".jsonl"));
}

TEST_CASE("verify passes and its negative control fails")
{
    TempDir dir;
    std::ostringstream out, err;
    CHECK(cmd_verify({40, dir.path / "report.json", false}, out, err) == ExitCode::Success);
    CHECK(out.str().find("FAIL") == std::string::npos);
    CHECK(read_file(dir.path / "report.json").find("firing_order_invariance") != std::string::npos);

    std::ostringstream bad;
    CHECK(cmd_verify({40, std::nullopt, true}, bad, err) == ExitCode::InvariantViolation);
    CHECK(bad.str().find("FAIL firing_order_invariance") != std::string::npos);
}
