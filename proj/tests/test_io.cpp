// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "kglab/cli.hpp"
#include "kglab/errors.hpp"
#include "kglab/trace_io.hpp"

using namespace kglab;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

struct CliRun {
    int code;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "kglab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("kglab_test_io_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("default configuration") {
    const RunConfig c = parse("");
    REQUIRE(c.grid.R == 60.0);
    REQUIRE(c.grid.N == 4801);
    REQUIRE(c.evolve.dt == 0.01);
    REQUIRE(c.weights.A == 20.0);
    REQUIRE(c.make_grid().sponge_width() == 10.0);
    REQUIRE(c.shoot.amplitudes.size() == 4);
}

TEST_CASE("configuration values are parsed") {
    const RunConfig c = parse(
        "[grid]\nR = 40\nN = 3201\n[evolve]\nmode = linearized\nsponge = false\nt_end = 3\n"
        "[initial]\npreset = soliton+Y2\namplitude = 2e-3\n[shoot]\namplitudes = 0.01, 0.002\n[run]\nseed = 7\n");
    REQUIRE(c.grid.R == 40.0);
    REQUIRE(c.grid.N == 3201);
    REQUIRE(c.evolve.mode == EvolveMode::linearized);
    REQUIRE_FALSE(c.evolve.sponge);
    REQUIRE(c.initial.preset == "soliton+Y2");
    REQUIRE(c.initial.amplitude == 2e-3);
    REQUIRE(c.shoot.amplitudes == std::vector<double>{0.01, 0.002});
    REQUIRE(c.seed == 7);
}

TEST_CASE("print-config output parses back to the same configuration") {
    RunConfig c = parse("[weights]\neps = 0.2\n[evolve]\ndt = 0.005\n[shoot]\namplitudes = 0.03\n");
    std::ostringstream os;
    print_config(os, c);
    std::ostringstream again;
    print_config(again, parse(os.str()));
    REQUIRE(os.str() == again.str());
}

TEST_CASE("configuration errors") {
    REQUIRE_THROWS_AS(parse("[grid]\nN = 4800\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[grid]\nR = abc\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[grid]\nM = 3\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[gird]\nR = 3\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[evolve]\ndt = 0.02\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[evolve]\nmode = chaotic\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[initial]\npreset = kink\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[initial]\npreset = custom\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[weights]\nA = 5\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("[shoot]\namplitudes = 0.1,,0.2\n"), ConfigError);
    REQUIRE_THROWS_AS(parse("R = 3\n"), ConfigError);
}

TEST_CASE("trace CSV round-trips bit for bit") {
    std::vector<TraceRecord> recs(3);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        auto row = to_row(recs[i]);
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = std::sqrt(2.0 + static_cast<double>(i * 40 + k)) * 1e-7;
        recs[i] = from_row(row);
    }
    recs[1].N2 = -0.0;
    recs[2].K = std::numeric_limits<double>::quiet_NaN();
    std::stringstream io;
    TraceWriter w(io);
    for (const auto& r : recs) w.write(r);
    w.footer("status", "complete");
    const auto file = read_trace_csv(io);
    REQUIRE(file.records.size() == 3);
    for (std::size_t i = 0; i < 2; ++i) REQUIRE(to_row(file.records[i]) == to_row(recs[i]));
    REQUIRE(std::signbit(file.records[1].N2));
    REQUIRE(std::isnan(file.records[2].K));
    REQUIRE(file.meta.size() == 1);
    REQUIRE(file.meta[0] == std::pair<std::string, std::string>{"status", "complete"});
}

TEST_CASE("format_double is shortest round-trip") {
    REQUIRE(format_double(0.1) == "0.1");
    REQUIRE(format_double(1e-300) == "1e-300");
    for (double v : {M_PI, 1.0 / 3.0, -2.5e-17}) REQUIRE(std::stod(format_double(v)) == v);
}

TEST_CASE("malformed traces are schema errors") {
    std::stringstream good;
    TraceWriter w(good);
    w.write(TraceRecord{});
    const std::string text = good.str();

    std::istringstream wrong_header("t,a1\n0,0\n");
    REQUIRE_THROWS_AS(read_trace_csv(wrong_header), SchemaError);
    std::istringstream short_row(text.substr(0, text.find('\n') + 1) + "0,1,2\n");
    REQUIRE_THROWS_AS(read_trace_csv(short_row), SchemaError);
    std::string bad = text;
    bad.replace(bad.find('\n') + 1, 1, "x");
    std::istringstream bad_number(bad);
    REQUIRE_THROWS_AS(read_trace_csv(bad_number), SchemaError);
    std::istringstream empty("");
    REQUIRE_THROWS_AS(read_trace_csv(empty), SchemaError);
    REQUIRE_THROWS_AS(read_trace_csv(std::string("/nonexistent/trace.csv")), ConfigError);
}

TEST_CASE("checkpoint round-trip and grid mismatch") {
    const Grid1D g(20.0, 801);
    const auto b = build_basis(g);
    const FieldState s{b.Q + 0.01 * b.Y2, (1.0 / 3.0) * b.Y0, 2.75};
    std::stringstream io;
    write_checkpoint(io, s);
    const std::string text = io.str();
    const auto back = read_checkpoint(io, g);
    REQUIRE(back.time == 2.75);
    for (std::size_t j = 0; j < g.size(); ++j) {
        REQUIRE(back.phi1[j] == s.phi1[j]);
        REQUIRE(back.phi2[j] == s.phi2[j]);
    }
    std::istringstream other(text);
    REQUIRE_THROWS_AS(read_checkpoint(other, Grid1D(20.0, 1601)), SchemaError);
    std::istringstream garbage("hello\n");
    REQUIRE_THROWS_AS(read_checkpoint(garbage, g), SchemaError);
}

TEST_CASE("cli exit codes for usage errors") {
    REQUIRE(cli({}).code == kExitConfigError);
    REQUIRE(cli({"--bogus", "fgr"}).code == kExitConfigError);
    REQUIRE(cli({"nonsense"}).code == kExitConfigError);
    REQUIRE(cli({"--config", "/nonexistent.ini", "fgr"}).code == kExitConfigError);
    REQUIRE(cli({"--preset", "kink", "fgr"}).code == kExitConfigError);
    REQUIRE(cli({"trace-check"}).code == kExitConfigError);
    REQUIRE(cli({"--help"}).code == kExitPass);
}

TEST_CASE("cli print-config honours overrides") {
    const auto r = cli({"--print-config", "--seed", "11", "--preset", "soliton+Y0"});
    REQUIRE(r.code == kExitPass);
    REQUIRE(r.out.find("seed = 11") != std::string::npos);
    REQUIRE(r.out.find("preset = soliton+Y0") != std::string::npos);
}

TEST_CASE("cli fgr writes a passing report") {
    const auto dir = scratch("fgr");
    const auto r = cli({"--out", dir.string(), "fgr"});
    REQUIRE(r.code == kExitPass);
    std::ifstream in(dir / "fgr_report.json");
    const auto j = nlohmann::json::parse(in);
    REQUIRE(j["command"] == "fgr");
    REQUIRE(j["pass"] == true);
    REQUIRE(j["checks"].size() >= 4);
    REQUIRE(std::abs(j["data"]["Gamma_relative_error"].get<double>()) <= 1e-9);
}

TEST_CASE("cli trace-check rejects empty and corrupted traces") {
    const auto dir = scratch("tc");
    {
        std::ofstream f(dir / "empty.csv");
        TraceWriter w(f);
    }
    REQUIRE(cli({"--out", dir.string(), "trace-check", (dir / "empty.csv").string()}).code == kExitConfigError);
    {
        std::ofstream f(dir / "bad.csv");
        f << "not,a,trace\n1,2,3\n";
    }
    const auto r = cli({"--out", dir.string(), "trace-check", (dir / "bad.csv").string()});
    REQUIRE(r.code == kExitConfigError);
    REQUIRE(r.err.find("schema") != std::string::npos);
}

TEST_CASE("worker count from the environment") {
    ::setenv("KGLAB_THREADS", "3", 1);
    REQUIRE(worker_threads() == 3);
    ::setenv("KGLAB_THREADS", "0", 1);
    REQUIRE_THROWS_AS(worker_threads(), ConfigError);
    ::setenv("KGLAB_THREADS", "two", 1);
    REQUIRE_THROWS_AS(worker_threads(), ConfigError);
    ::unsetenv("KGLAB_THREADS");
    REQUIRE(worker_threads() >= 1);
}
