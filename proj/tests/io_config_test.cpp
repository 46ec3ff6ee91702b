#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "fluxinit/config.hpp"
#include "fluxinit/csv.hpp"
#include "fluxinit/errors.hpp"
#include "fluxinit/synthetic.hpp"

using namespace fluxinit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("fluxinit_io_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

const std::string kDevice =
    R"("device": {"E_C": 1.531, "E_L": 0.685, "E_J": 4.164, "omega_r": 6.503, "g_rf": 0.056})";

std::vector<std::string> problems_of(const std::string& text) {
    try {
        parse_config(text, ".");
    } catch (const ValidationError& e) {
        return e.problems();
    }
    return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
    return std::any_of(problems.begin(), problems.end(),
                       [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Fnv1a, KnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(FormatNumber, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.503, 1e22, 0.0}) {
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
    EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Csv, WriteReadRoundTrip) {
    const auto dir = temp_dir("roundtrip");
    Table t{{"x", "y"}, {{0.1, 1.0 / 3.0}, {-1e-9, 42.0}}};
    write_csv(dir / "t.csv", Provenance{0xabcdefULL, "spectrum"}, t);
    EXPECT_EQ(first_line(dir / "t.csv"), "# fluxinit 0.1.0 config=0000000000abcdef command=spectrum");
    const auto back = read_csv(dir / "t.csv");
    EXPECT_EQ(back.columns, t.columns);
    EXPECT_EQ(back.rows, t.rows);
}

TEST(Csv, MissingFileIsIoError) {
    try {
        read_csv("/nonexistent/fluxinit/file.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Csv, CrossingRoundTrip) {
    CrossingSynthSpec spec;
    spec.ef_intercept = spec.s_intercept = 1.8;
    spec.ef_slope = -1.0;
    spec.s_slope = -2.0;
    spec.flux_offsets = {-0.05, 0.0, 0.05};
    spec.probe_freqs = {1.7, 1.75, 1.8, 1.85, 1.9};
    const auto data = synth_crossing(spec, NoiseSpec{1, 0.01});
    const auto dir = temp_dir("crossing");
    write_csv(dir / "c.csv", Provenance{}, crossing_table(data));
    const auto back = read_crossing_csv(dir / "c.csv");
    EXPECT_EQ(back.flux_offsets, data.flux_offsets);
    EXPECT_EQ(back.probe_freqs, data.probe_freqs);
    EXPECT_TRUE(back.amplitude == data.amplitude);
}

TEST(Csv, PhaseTrackRoundTrip) {
    PhaseSynthSpec spec;
    spec.delta_f = {0.0, -0.01};
    spec.samples = 7;
    const auto track = synth_phase_track(spec, NoiseSpec{2, 0.01});
    const std::vector<double> volts = {0.0, 0.25};
    const auto dir = temp_dir("phase");
    write_csv(dir / "p.csv", Provenance{}, phase_track_table(track, volts));
    std::vector<double> vback;
    const auto back = read_phase_track_csv(dir / "p.csv", &vback);
    EXPECT_EQ(vback, volts);
    EXPECT_EQ(back.dt, track.dt);
    ASSERT_EQ(back.amplitudes.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back.amplitudes[i].t, track.amplitudes[i].t);
        EXPECT_EQ(back.amplitudes[i].p1, track.amplitudes[i].p1);
        EXPECT_EQ(back.amplitudes[i].p2, track.amplitudes[i].p2);
        EXPECT_EQ(back.amplitudes[i].p3, track.amplitudes[i].p3);
    }
}

TEST(Csv, IqAndDecayRoundTrip) {
    const auto shots = synth_iq_shots({0.0, 0.0}, {3.0, 1.0}, 0.7, 0.4, 50, NoiseSpec{3, 0.0});
    const auto series = synth_decay_series(40.0, -0.002, 0.0005, {0.0, 5.0, 10.0}, NoiseSpec{4, 1e-5});
    const auto dir = temp_dir("iqdecay");
    write_csv(dir / "iq.csv", Provenance{}, iq_table(shots));
    write_csv(dir / "d.csv", Provenance{}, decay_table(series));
    EXPECT_EQ(read_iq_csv(dir / "iq.csv"), shots);
    const auto back = read_decay_csv(dir / "d.csv");
    EXPECT_EQ(back.delays, series.delays);
    EXPECT_EQ(back.shifts, series.shifts);
}

TEST(Config, MinimalDeviceParses) {
    const auto cfg = parse_config("{" + kDevice + "}", ".");
    EXPECT_TRUE(cfg.has_device);
    EXPECT_DOUBLE_EQ(cfg.device.circuit.E_J, 4.164);
    EXPECT_DOUBLE_EQ(cfg.device.g_coupled, 0.056);
    EXPECT_DOUBLE_EQ(cfg.device.Gamma, 1.0 / 40.0);
    EXPECT_EQ(cfg.device.triple, TripleKind::Red);
    EXPECT_EQ(cfg.hash, fnv1a64(cfg.canonical));
}

TEST(Config, OutputDirDoesNotChangeHash) {
    const auto a = parse_config("{" + kDevice + R"(, "output": {"dir": "x"}})", ".");
    const auto b = parse_config("{" + kDevice + R"(, "output": {"dir": "y"}})", ".");
    const auto c = parse_config("{" + kDevice + R"(, "seed": 5})", ".");
    EXPECT_EQ(a.hash, b.hash);
    EXPECT_NE(a.hash, c.hash);
}

TEST(Config, UnknownKeyRejected) {
    const auto p = problems_of("{" + kDevice + R"(, "shedule": {}})");
    EXPECT_TRUE(mentions(p, "shedule: unknown key"));
    const auto q = problems_of(R"({"device": {"E_C": 1.5, "E_L": 0.7, "E_J": 4, "omega_r": 6.5,
                                              "g_rf": 0.05, "Ej": 1}})");
    EXPECT_TRUE(mentions(q, "device.Ej: unknown key"));
}

TEST(Config, EveryProblemListed) {
    const auto p = problems_of(R"({"device": {"E_C": -1, "E_L": 0.7, "omega_r": 6.5, "triple": "green"},
                                   "schedule": {"T": 100}})");
    EXPECT_TRUE(mentions(p, "device.E_C"));
    EXPECT_TRUE(mentions(p, "device.E_J: is required"));
    EXPECT_TRUE(mentions(p, "device.triple"));
    EXPECT_TRUE(mentions(p, "one of g_rf or g_rh"));
    EXPECT_TRUE(mentions(p, "schedule.Omega: is required"));
    EXPECT_GE(p.size(), 5u);
}

TEST(Config, CouplingMustMatchTriple) {
    EXPECT_TRUE(mentions(problems_of(R"({"device": {"E_C": 1.5, "E_L": 0.7, "E_J": 4, "omega_r": 6.5,
                                                    "g_rf": 0.05, "g_rh": 0.07}})"),
                         "give only one"));
    EXPECT_TRUE(mentions(problems_of(R"({"device": {"E_C": 1.5, "E_L": 0.7, "E_J": 4, "omega_r": 6.5,
                                                    "g_rh": 0.07}})"),
                         "blue triple"));
    const auto cfg = parse_config(R"({"device": {"E_C": 1.5, "E_L": 0.7, "E_J": 4, "omega_r": 6.5,
                                                 "g_rh": 0.077, "triple": "blue"}})",
                                  ".");
    EXPECT_EQ(cfg.device.triple, TripleKind::Blue);
    EXPECT_DOUBLE_EQ(cfg.device.g_coupled, 0.077);
}

TEST(Config, GridForms) {
    const auto cfg = parse_config(R"({"sweep": {"omegas": [0.04, 0.05],
                                                "durations": {"start": 200, "stop": 1000, "step": 40},
                                                "t_pre": {"start": 0, "stop": 1, "count": 5}}})",
                                  ".");
    EXPECT_EQ(cfg.sweep.omegas, (std::vector<double>{0.04, 0.05}));
    ASSERT_EQ(cfg.sweep.durations.size(), 21u);
    EXPECT_DOUBLE_EQ(cfg.sweep.durations.back(), 1000.0);
    EXPECT_EQ(cfg.sweep.t_pre, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
}

TEST(Config, BadGridsRejected) {
    EXPECT_TRUE(mentions(problems_of(R"({"sweep": {"omegas": {"start": 0, "stop": 1, "count": 3, "step": 0.5}}})"),
                         "exactly one of 'count' or 'step'"));
    EXPECT_TRUE(mentions(problems_of(R"({"sweep": {"omegas": {"start": 0, "stop": 1}}})"),
                         "exactly one of 'count' or 'step'"));
    EXPECT_TRUE(mentions(problems_of(R"({"sweep": {"omegas": {"start": 0, "stop": 1, "step": 0}}})"),
                         "step must be > 0"));
    EXPECT_TRUE(mentions(problems_of(R"({"sweep": {"omegas": {"start": 1, "stop": 0, "step": 0.1}}})"),
                         "step must be > 0"));
    EXPECT_TRUE(mentions(problems_of(R"({"sweep": {"durations": [100, -5]}})"), "must be > 0"));
}

TEST(Config, ScheduleChecks) {
    EXPECT_TRUE(mentions(problems_of(R"({"schedule": {"Omega": 0.07, "dt": 0.1, "output_dt": 0.25}})"),
                         "multiple of dt"));
    EXPECT_TRUE(mentions(problems_of(R"({"schedule": {"Omega": 0.07, "theta_f": 3.0}})"), "theta_f"));
    const auto cfg = parse_config(R"({"schedule": {"Omega": 0.071}})", ".");
    EXPECT_TRUE(cfg.has_schedule);
    EXPECT_DOUBLE_EQ(cfg.schedule.T, 500.0);
}

TEST(Config, RelativePathsResolveAgainstConfigDir) {
    const auto cfg = parse_config(R"({"calibration": {"crossing": "data/c.csv"}})", "/base");
    EXPECT_EQ(cfg.calibration.crossing, fs::path("/base/data/c.csv"));
}

TEST(Config, RequiredSectionsPerCommand) {
    const auto cfg = parse_config("{" + kDevice + "}", ".");
    EXPECT_NO_THROW(require_for_command(cfg, "spectrum"));
    EXPECT_THROW(require_for_command(cfg, "simulate-init"), ValidationError);
    try {
        require_for_command(cfg, "error-map");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_TRUE(mentions(e.problems(), "sweep.durations"));
        EXPECT_TRUE(mentions(e.problems(), "sweep.omegas"));
    }
    EXPECT_THROW(require_for_command(parse_config("{}", "."), "synth"), ValidationError);
}

TEST(Config, LoadMissingFileIsIoError) {
    try {
        load_config("/nonexistent/fluxinit.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Config, MalformedJsonIsValidationError) {
    EXPECT_THROW(parse_config("{\"device\": ", "."), ValidationError);
}
