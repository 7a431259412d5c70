#include <doctest.h>

#include <thread>

#include <json.hpp>

#include "oracles.hpp"
#include "temp_dir.hpp"
#include "vibro/config.hpp"
#include "vibro/error.hpp"
#include "vibro/pipeline.hpp"
#include "vibro/recording_io.hpp"
#include "vibro/synth.hpp"

using namespace vibro;
using nlohmann::json;
using testutil::TempDir;

namespace {

Recording small_recording() {
    Recording rec;
    rec.label = "P1";
    rec.sample_rate = 1000.0;
    rec.channels = {
        {"ax", oracle::sine(50.0, 1000.0, 100)},
        {"ay", oracle::sine(60.0, 1000.0, 100)},
        {"az", oracle::sine(70.0, 1000.0, 100)},
    };
    return rec;
}

json impact_scenario(const char* label, double fundamental) {
    // In-bin geometry: fs 1000 with a 2000-sample block gives 0.5 Hz bins.
    json scenario = {
        {"label", label},
        {"sample_rate_hz", 1000.0},
        {"duration_s", 4.0},
        {"seed", 3},
        {"noise_sd", 0.0},
        {"axes",
         {{"ax", json::array({{{"type", "modal_impulse"},
                               {"modes", json::array({{{"frequency_hz", fundamental},
                                                       {"zeta", 0.0},
                                                       {"amplitude", 1.0}}})}}})},
          {"ay", json::array({{{"type", "modal_impulse"},
                               {"modes", json::array({{{"frequency_hz", 2.0 * fundamental},
                                                       {"zeta", 0.0},
                                                       {"amplitude", 1.0}}})}}})},
          {"az", json::array()}}},
    };
    return scenario;
}

} // namespace

TEST_CASE("recording write/read round-trip is bit exact") {
    TempDir dir("vibro_io");
    Recording rec = small_recording();
    rec.channels.push_back({"tacho", synth::tacho_pulses(10.0, 1000.0, 0.1, 0.4)});
    const std::string path = dir.file("rec.csv");
    write_recording(rec, path);

    const Recording back = parse_recording(path);
    CHECK(back.label == "P1");
    CHECK(back.sample_rate == 1000.0);
    REQUIRE(back.channels.size() == 4);
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        CHECK(back.channels[c].first == rec.channels[c].first);
        REQUIRE(back.channels[c].second.size() == rec.channels[c].second.size());
        for (std::size_t i = 0; i < rec.channels[c].second.size(); ++i) {
            CHECK(back.channels[c].second[i] == rec.channels[c].second[i]);
        }
    }
    CHECK(!back.digest.empty());

    // Writing the parsed recording again reproduces the same bytes.
    const std::string path2 = dir.file("rec2.csv");
    write_recording(back, path2);
    CHECK(testutil::read_file(path) == testutil::read_file(path2));
}

TEST_CASE("parse_recording accepts the minimal header without t or tacho") {
    TempDir dir("vibro_io");
    const std::string p = dir.file("min.csv");
    testutil::write_file(p, "# sample_rate_hz=200\nax,ay,az\n0.5,1,2\n-0.5,1,2\n0.25,1,2\n");
    const Recording rec = parse_recording(p);
    CHECK(rec.sample_rate == 200.0);
    CHECK(rec.label.empty());
    CHECK(rec.length() == 3);
    CHECK_FALSE(rec.has_channel("tacho"));
    CHECK(rec.channel("ax")[0] == 0.5);
    CHECK(rec.channel("ax")[1] == -0.5);
}

TEST_CASE("parse_recording rejects malformed files with line numbers") {
    TempDir dir("vibro_io");

    SUBCASE("missing sample-rate header") {
        const std::string p = dir.file("a.csv");
        testutil::write_file(p, "t,ax,ay,az\n0,1,2,3\n");
        CHECK_THROWS_AS(parse_recording(p), InputError);
    }
    SUBCASE("unknown channel layout") {
        const std::string p = dir.file("b.csv");
        testutil::write_file(p, "# sample_rate_hz=100\nfoo,bar\n1,2\n");
        CHECK_THROWS_AS(parse_recording(p), InputError);
    }
    SUBCASE("non-numeric cell names the line") {
        const std::string p = dir.file("c.csv");
        testutil::write_file(p, "# sample_rate_hz=100\nax,ay,az\n1,2,3\n1,oops,3\n");
        try {
            parse_recording(p);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("line 4") != std::string::npos);
        }
    }
    SUBCASE("inconsistent time column") {
        const std::string p = dir.file("d.csv");
        testutil::write_file(p,
                             "# sample_rate_hz=100\nt,ax,ay,az\n0,1,1,1\n0.01,1,1,1\n0.5,1,1,1\n");
        CHECK_THROWS_AS(parse_recording(p), InputError);
    }
    SUBCASE("wrong column count") {
        const std::string p = dir.file("e.csv");
        testutil::write_file(p, "# sample_rate_hz=100\nax,ay,az\n1,2,3\n1,2\n");
        CHECK_THROWS_AS(parse_recording(p), InputError);
    }
    SUBCASE("fewer than two rows") {
        const std::string p = dir.file("f.csv");
        testutil::write_file(p, "# sample_rate_hz=100\nax,ay,az\n1,2,3\n");
        CHECK_THROWS_AS(parse_recording(p), InputError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_recording(dir.file("nope.csv")), InputError);
    }
}

TEST_CASE("parse_recording turns arbitrary garbage into input errors") {
    TempDir dir("vibro_io");
    std::mt19937_64 eng(3);
    for (int i = 0; i < 30; ++i) {
        std::string garbage;
        const std::size_t len = eng() % 240;
        for (std::size_t j = 0; j < len; ++j) {
            const auto c = static_cast<char>(eng() % 96 + 32);
            garbage.push_back(eng() % 17 == 0 ? '\n' : c);
        }
        const std::string p = dir.file("garbage.csv");
        testutil::write_file(p, garbage);
        CHECK_THROWS_AS(parse_recording(p), InputError);
    }
}

TEST_CASE("config defaults match the documented values") {
    const AnalysisConfig cfg = AnalysisConfig::from_json(json::object());
    CHECK(cfg.bands.lfr.low == 0.0);
    CHECK(cfg.bands.lfr.high == 250.0);
    CHECK(cfg.bands.hfr.low == 1200.0);
    CHECK(cfg.bands.hfr.high == 3600.0);
    CHECK(cfg.envelope_band.low == 2000.0);
    CHECK(cfg.envelope_band.high == 3000.0);
    CHECK(cfg.mains.frequency == 50.0);
    CHECK(cfg.mains.harmonics == 2);
    CHECK(cfg.mains.tol == 0.5);
    CHECK(cfg.thresholds.peak_floor == 5.0);
    CHECK(cfg.thresholds.prominence == 0.1);
    CHECK(cfg.thresholds.imbalance_factor == 5.0);
    CHECK(cfg.thresholds.misalignment_ratio == 0.5);
    CHECK(cfg.thresholds.asymmetry == 0.2);
    CHECK(cfg.thresholds.resonance_tol_pct == 2.0);
    CHECK(cfg.waterfall.block_size == 2000);
    CHECK_FALSE(cfg.setup.has_value());
    CHECK(cfg.modal_frequencies.empty());
}

TEST_CASE("config parsing honours overrides and rejects junk") {
    const json overrides = {
        {"bands", {{"lfr", {0.0, 200.0}}, {"envelope", {1500.0, 2500.0}}}},
        {"mains", {{"tol", 0.45}}},
        {"thresholds", {{"asymmetry", 0.3}}},
        {"setup", {{"rpm", 12032.0}, {"teeth", 6}, {"tool_diameter_mm", 6.0},
                   {"cutting_speed_m_min", 227.0}}},
        {"modal_frequencies", {480.0, 9.0}},
    };
    const AnalysisConfig cfg = AnalysisConfig::from_json(overrides);
    CHECK(cfg.bands.lfr.high == 200.0);
    CHECK(cfg.envelope_band.low == 1500.0);
    CHECK(cfg.mains.tol == 0.45);
    CHECK(cfg.thresholds.asymmetry == 0.3);
    REQUIRE(cfg.setup.has_value());
    CHECK(cfg.setup->teeth == 6);
    CHECK(cfg.modal_frequencies.size() == 2);

    CHECK_THROWS_AS(AnalysisConfig::from_json({{"bandz", json::object()}}), ConfigError);
    CHECK_THROWS_AS(AnalysisConfig::from_json({{"bands", {{"lfr", {250.0, 0.0}}}}}), ConfigError);
    CHECK_THROWS_AS(AnalysisConfig::from_json({{"mains", {{"tol", -1.0}}}}), ConfigError);
}

TEST_CASE("config loading distinguishes missing files from broken JSON") {
    TempDir dir("vibro_io");
    CHECK_THROWS_AS(AnalysisConfig::load(dir.file("absent.json")), InputError);
    const std::string broken = dir.file("broken.json");
    testutil::write_file(broken, "{ not json");
    CHECK_THROWS_AS(AnalysisConfig::load(broken), ConfigError);
    const std::string good = dir.file("good.json");
    testutil::write_file(good, R"({"mains": {"tol": 0.4}})");
    CHECK(AnalysisConfig::load(good).mains.tol == 0.4);
}

TEST_CASE("waterfall block size is config-exposed") {
    AnalysisConfig cfg;
    cfg.waterfall.block_size = 100;
    json tiny = {{"sample_rate_hz", 1000.0}, {"duration_s", 0.2}};
    const AnalysisResult result = run_impact(synthesize_scenario(tiny), cfg);
    CHECK(result.report.at("settings").at("waterfall_block_size") == 100);
}

TEST_CASE("scenario synthesis is deterministic and strict") {
    const json scenario = impact_scenario("P1", 17.0);

    const Recording a = synthesize_scenario(scenario);
    const Recording b = synthesize_scenario(scenario);
    CHECK(a.digest == b.digest);
    CHECK(a.channels == b.channels);
    CHECK(a.label == "P1");
    CHECK(a.length() == 4000);

    json empty = {{"sample_rate_hz", 100.0}, {"duration_s", 1.0}};
    const Recording zero = synthesize_scenario(empty);
    CHECK(zero.length() == 100);
    for (const auto& [name, samples] : zero.channels) {
        (void)name;
        for (double v : samples) CHECK(v == 0.0);
    }

    json bad = scenario;
    bad["axes"]["ax"][0]["type"] = "laser";
    CHECK_THROWS_AS(synthesize_scenario(bad), ConfigError);
    json unknown = scenario;
    unknown["extra"] = 1;
    CHECK_THROWS_AS(synthesize_scenario(unknown), ConfigError);
}

TEST_CASE("noise streams differ between axes but stay seeded") {
    json scenario = {{"sample_rate_hz", 1000.0}, {"duration_s", 1.0}, {"seed", 11},
                     {"noise_sd", 0.1}};
    const Recording rec = synthesize_scenario(scenario);
    CHECK(rec.channel("ax") != rec.channel("ay"));
    const Recording again = synthesize_scenario(scenario);
    CHECK(rec.channel("ax") == again.channel("ax"));
}

TEST_CASE("run_impact finds the injected modes and stays quiet on silence") {
    AnalysisConfig cfg;
    cfg.waterfall.block_size = 2000;

    const Recording rec = synthesize_scenario(impact_scenario("P1", 17.0));
    const AnalysisResult result = run_impact(rec, cfg);
    validate_report(result.report);
    CHECK(result.report.at("analysis") == "impact");

    const auto& peaks = result.report.at("axes").at("ax").at("peaks");
    REQUIRE(peaks.size() >= 1);
    CHECK(peaks[0].at("frequency_hz").get<double>() == doctest::Approx(17.0).epsilon(0.01));
    CHECK(peaks[0].at("band") == "LFR");

    // One waterfall artifact per axis.
    CHECK(result.artifacts.size() == 3);
    CHECK(result.artifacts[0].name == "waterfall_ax.csv");
    CHECK(result.artifacts[0].csv.rfind("time_s,frequency_hz,amplitude\n", 0) == 0);

    // A zero recording yields an empty peak list, not an error.
    json quiet = {{"sample_rate_hz", 1000.0}, {"duration_s", 4.0}};
    const AnalysisResult silent = run_impact(synthesize_scenario(quiet), cfg);
    CHECK(silent.report.at("axes").at("ax").at("peaks").empty());
}

TEST_CASE("run_impact report carries all three impact modes of a full scenario") {
    json scenario = {
        {"label", "P1"},
        {"sample_rate_hz", 6250.0},
        {"duration_s", 4.0},
        {"seed", 2},
        {"noise_sd", 1e-4},
        {"axes",
         {{"ax", json::array({{{"type", "modal_impulse"},
                               {"modes",
                                json::array({{{"frequency_hz", 17.0}, {"zeta", 0.02}, {"amplitude", 1.0}},
                                             {{"frequency_hz", 50.5}, {"zeta", 0.02}, {"amplitude", 1.0}},
                                             {{"frequency_hz", 130.0}, {"zeta", 0.02}, {"amplitude", 1.0}}})}}})}}},
    };
    AnalysisConfig cfg;
    const AnalysisResult result = run_impact(synthesize_scenario(scenario), cfg);
    const auto& peaks = result.report.at("axes").at("ax").at("peaks");
    for (double want : {17.0, 50.5, 130.0}) {
        const bool found = std::any_of(peaks.begin(), peaks.end(), [&](const json& p) {
            return std::abs(p.at("frequency_hz").get<double>() - want) <= 3.125;
        });
        CHECK(found);
    }
}

TEST_CASE("run_impact rejects a recording shorter than one block") {
    AnalysisConfig cfg;
    json tiny = {{"sample_rate_hz", 1000.0}, {"duration_s", 0.1}};
    CHECK_THROWS_AS(run_impact(synthesize_scenario(tiny), cfg), AnalysisError);
}

TEST_CASE("run_compare tracks modes across three configurations") {
    AnalysisConfig cfg;
    const std::vector<double> fundamentals{17.0, 20.0, 22.0};
    std::vector<json> reports;
    const char* labels[] = {"P1", "P2", "P3"};
    for (std::size_t i = 0; i < 3; ++i) {
        const Recording rec = synthesize_scenario(impact_scenario(labels[i], fundamentals[i]));
        reports.push_back(run_impact(rec, cfg).report);
    }

    const AnalysisResult result = run_compare(reports, cfg);
    validate_report(result.report);
    const auto& ax = result.report.at("axes").at("ax");
    REQUIRE(ax.at("tracks").size() >= 1);
    CHECK(ax.at("tracks")[0].at("trend") == "increasing");
    REQUIRE(ax.at("stiffness").size() >= 1);
    const auto& st = ax.at("stiffness")[0];
    CHECK(st.at("reference") == "P1");
    CHECK(st.at("verdict") == "increase");
    CHECK(st.at("entries")[1].at("ratio").get<double>() == doctest::Approx(1.384).epsilon(0.02));
    CHECK(st.at("entries")[2].at("ratio").get<double>() == doctest::Approx(1.675).epsilon(0.02));
}

TEST_CASE("run_compare needs two reports and identical axes") {
    AnalysisConfig cfg;
    const Recording rec = synthesize_scenario(impact_scenario("P1", 17.0));
    const json report = run_impact(rec, cfg).report;
    CHECK_THROWS_AS(run_compare({report}, cfg), InputError);
    CHECK_THROWS_AS(run_compare({report, report}, cfg), InputError); // duplicate label
}

TEST_CASE("run_spindle measures speed, flags imbalance, and checks the setup") {
    json scenario = {
        {"label", "spindle"},
        {"sample_rate_hz", 25000.0},
        {"duration_s", 2.0},
        {"seed", 5},
        {"noise_sd", 0.01},
        {"tacho", {{"rotation_hz", 200.533333}, {"duty", 0.2}}},
        {"axes",
         {{"ax", json::array({{{"type", "rotor"},
                               {"rotation_hz", 200.533333},
                               {"orders", json::array({{{"order", 1}, {"amplitude", 1.0}}})}}})}}},
    };
    AnalysisConfig cfg;
    MachiningSetup setup;
    setup.spindle_rpm = 12032.0;
    setup.teeth = 6;
    setup.tool_diameter_mm = 6.0;
    setup.cutting_speed_m_min = 227.0;
    cfg.setup = setup;

    const Recording rec = synthesize_scenario(scenario);
    const AnalysisResult result = run_spindle(rec, cfg);
    validate_report(result.report);

    CHECK(result.report.at("rotation").at("rpm").get<double>() ==
          doctest::Approx(12032.0).epsilon(1.0 / 12032.0));
    CHECK(result.report.at("axes").at("ax").at("defects").at("imbalance").at("flagged") == true);
    CHECK(result.report.at("axes").at("ay").at("defects").at("imbalance").at("flagged") == false);
    CHECK(result.report.at("setup_check").at("consistent") == true);
    CHECK(result.report.at("setup_check").at("computed_cutting_speed_m_min").get<double>() ==
          doctest::Approx(226.8).epsilon(0.001));

    // A declared 300 m/min cannot come from this rpm and diameter.
    cfg.setup->cutting_speed_m_min = 300.0;
    const AnalysisResult warned = run_spindle(rec, cfg);
    CHECK(warned.report.at("setup_check").at("consistent") == false);
    CHECK(warned.report.at("warnings").size() >= 1);
}

TEST_CASE("run_spindle warns when the rotation speed drifts") {
    const double fs = 2000.0;
    const std::size_t n = 8000;
    std::vector<double> tacho(n, 0.0);
    double t = 0.05, period = 0.08;
    while (t < 3.9) {
        const auto idx = static_cast<std::size_t>(t * fs);
        for (std::size_t j = idx; j < std::min(n, idx + 20); ++j) tacho[j] = 1.0;
        period *= 1.01; // keeps slowing down: well past the 2% variation gate
        t += period;
    }
    Recording rec;
    rec.label = "drift";
    rec.sample_rate = fs;
    rec.channels = {{"ax", std::vector<double>(n, 0.0)},
                    {"ay", std::vector<double>(n, 0.0)},
                    {"az", std::vector<double>(n, 0.0)},
                    {"tacho", std::move(tacho)}};

    const AnalysisResult result = run_spindle(rec, AnalysisConfig{});
    const bool warned = std::any_of(
        result.report.at("warnings").begin(), result.report.at("warnings").end(),
        [](const json& w) {
            return w.get<std::string>().find("rotation speed varies") != std::string::npos;
        });
    CHECK(warned);
}

TEST_CASE("run_spindle wants a tachometer") {
    AnalysisConfig cfg;
    json scenario = {{"sample_rate_hz", 1000.0}, {"duration_s", 1.0}};
    CHECK_THROWS_AS(run_spindle(synthesize_scenario(scenario), cfg), InputError);
}

TEST_CASE("run_milling attributes the 9 Hz structural modulation") {
    json scenario = {
        {"label", "mill"},
        {"sample_rate_hz", 12000.0},
        {"duration_s", 2.0},
        {"seed", 6},
        {"noise_sd", 0.0},
        {"tacho", {{"rotation_hz", 100.0}, {"duty", 0.2}}},
        {"axes",
         {{"ax", json::array({{{"type", "milling"},
                               {"rotation_hz", 100.0},
                               {"teeth", 4},
                               {"resonance_hz", 2000.0},
                               {"resonance_zeta", 0.05},
                               {"modulation_hz", 9.0},
                               {"modulation_depth", 0.5}}})}}},
    };
    AnalysisConfig cfg;
    cfg.envelope_band = {1850.0, 2550.0};
    cfg.modal_frequencies = {9.0};
    MachiningSetup setup;
    setup.spindle_rpm = 6000.0;
    setup.teeth = 4;
    cfg.setup = setup;

    const Recording rec = synthesize_scenario(scenario);
    const AnalysisResult result = run_milling(rec, cfg);
    validate_report(result.report);

    const auto& mods = result.report.at("axes").at("ax").at("modulation_peaks");
    const bool structural = std::any_of(mods.begin(), mods.end(), [](const json& m) {
        return m.at("attribution") == "structural" &&
               std::abs(m.at("frequency_hz").get<double>() - 9.0) <= 0.5;
    });
    CHECK(structural);
    CHECK(result.report.at("axes").at("ax").contains("tooth_asymmetry"));
    CHECK(result.artifacts.size() == 6); // envelope + spectrum per axis

    // Band reaching Nyquist is a config error.
    AnalysisConfig bad = cfg;
    bad.envelope_band = {2000.0, 6000.0};
    CHECK_THROWS_AS(run_milling(rec, bad), ConfigError);
}

TEST_CASE("analyses are pure: concurrent runs reproduce the serial result") {
    const Recording rec = synthesize_scenario(impact_scenario("P1", 17.0));
    AnalysisConfig cfg;
    const std::string serial = serialize_report(run_impact(rec, cfg).report, true);

    std::string from_a, from_b;
    std::thread a([&] { from_a = serialize_report(run_impact(rec, cfg).report, true); });
    std::thread b([&] { from_b = serialize_report(run_impact(rec, cfg).report, true); });
    a.join();
    b.join();
    CHECK(from_a == serial);
    CHECK(from_b == serial);
}

TEST_CASE("serialize_report is stable under the reproducible flag") {
    json report = {{"schema_version", 1}, {"tool_version", kToolVersion},
                   {"analysis", "impact"}, {"warnings", json::array()},
                   {"axes", json::object()},
                   {"input", {{"label", "P1"}, {"digest", "x"}}}};
    const std::string a = serialize_report(report, true);
    const std::string b = serialize_report(report, true);
    CHECK(a == b);
    CHECK(a.find("generated_utc") == std::string::npos);
    const std::string stamped = serialize_report(report, false);
    CHECK(stamped.find("generated_utc") != std::string::npos);
}

TEST_CASE("validate_report rejects broken documents") {
    CHECK_THROWS_AS(validate_report(json::array()), InputError);
    CHECK_THROWS_AS(validate_report(json::object()), InputError);
    json report = {{"schema_version", 99}, {"tool_version", "x"}, {"analysis", "impact"},
                   {"warnings", json::array()}, {"axes", json::object()},
                   {"input", {{"label", "P1"}}}};
    CHECK_THROWS_AS(validate_report(report), InputError);
}
