#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "temp_dir.hpp"

using testutil::TempDir;

namespace {

int run_cli(const std::string& args) {
    const std::string command = std::string(VIBRO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

const char* kScenario = R"({
  "label": "P1",
  "sample_rate_hz": 1000.0,
  "duration_s": 4.0,
  "seed": 7,
  "noise_sd": 0.001,
  "axes": {
    "ax": [{"type": "modal_impulse",
            "modes": [{"frequency_hz": 17.0, "zeta": 0.0, "amplitude": 1.0}]}]
  }
})";

} // namespace

TEST_CASE("cli: synth then impact produces a report and waterfall artifacts") {
    TempDir dir("vibro_cli");
    const std::string scenario = dir.file("scenario.json");
    testutil::write_file(scenario, kScenario);
    const std::string rec = dir.file("rec.csv");
    const std::string report = dir.file("report.json");

    CHECK(run_cli("synth --config " + scenario + " --out " + rec) == 0);
    CHECK(std::filesystem::exists(rec));
    CHECK(run_cli("impact " + rec + " --out " + report + " --reproducible") == 0);
    CHECK(std::filesystem::exists(report));
    CHECK(std::filesystem::exists(dir.file("report_waterfall_ax.csv")));
    CHECK(std::filesystem::exists(dir.file("report_waterfall_az.csv")));
}

TEST_CASE("cli: exit codes follow the 1/2/3 contract") {
    TempDir dir("vibro_cli");

    SUBCASE("missing recording file is an input error") {
        CHECK(run_cli("impact " + dir.file("none.csv") + " --out " + dir.file("r.json")) == 1);
    }
    SUBCASE("bad usage is an input error") {
        CHECK(run_cli("impact --out " + dir.file("r.json")) == 1);
        CHECK(run_cli("frobnicate --out x") == 1);
        CHECK(run_cli("synth --out " + dir.file("r.csv")) == 1); // no scenario config
    }
    SUBCASE("compare with one report is a usage error") {
        CHECK(run_cli("compare " + dir.file("only.json") + " --out " + dir.file("t.json")) == 1);
    }
    SUBCASE("invalid config is a config error") {
        const std::string scenario = dir.file("scenario.json");
        testutil::write_file(scenario, kScenario);
        const std::string rec = dir.file("rec.csv");
        REQUIRE(run_cli("synth --config " + scenario + " --out " + rec) == 0);

        const std::string bad = dir.file("bad.json");
        testutil::write_file(bad, R"({"thresholds": {"prominence": 2.0}})");
        CHECK(run_cli("impact " + rec + " --config " + bad + " --out " + dir.file("r.json")) == 2);
    }
    SUBCASE("recording shorter than a block is an analysis error") {
        const std::string tiny = dir.file("tiny.json");
        testutil::write_file(tiny, R"({"sample_rate_hz": 1000.0, "duration_s": 0.5})");
        const std::string rec = dir.file("tiny.csv");
        REQUIRE(run_cli("synth --config " + tiny + " --out " + rec) == 0);
        CHECK(run_cli("impact " + rec + " --out " + dir.file("r.json")) == 3);
    }
    SUBCASE("spindle without pulses is an analysis error") {
        const std::string quiet = dir.file("quiet.json");
        // Tacho channel present but constant: zero rotation pulses.
        testutil::write_file(quiet, R"({
          "sample_rate_hz": 1000.0, "duration_s": 4.0,
          "tacho": {"rotation_hz": 0.25, "duty": 0.9}
        })");
        const std::string rec = dir.file("quiet.csv");
        REQUIRE(run_cli("synth --config " + quiet + " --out " + rec) == 0);
        CHECK(run_cli("spindle " + rec + " --out " + dir.file("r.json")) == 3);
    }
}

TEST_CASE("cli: compare produces a trend report from two impact reports") {
    TempDir dir("vibro_cli");
    const std::string s1 = dir.file("p1.json");
    const std::string s2 = dir.file("p2.json");
    testutil::write_file(s1, kScenario);
    std::string second(kScenario);
    second.replace(second.find("P1"), 2, "P2");
    second.replace(second.find("17.0"), 4, "20.0");
    testutil::write_file(s2, second);

    for (const char* tag : {"1", "2"}) {
        const std::string scenario = dir.file(std::string("p") + tag + ".json");
        const std::string rec = dir.file(std::string("r") + tag + ".csv");
        const std::string rep = dir.file(std::string("rep") + tag + ".json");
        REQUIRE(run_cli("synth --config " + scenario + " --out " + rec) == 0);
        REQUIRE(run_cli("impact " + rec + " --out " + rep + " --reproducible") == 0);
    }
    CHECK(run_cli("compare " + dir.file("rep1.json") + " " + dir.file("rep2.json") + " --out " +
                  dir.file("trend.json") + " --reproducible") == 0);
    const std::string trend = testutil::read_file(dir.file("trend.json"));
    CHECK(trend.find("\"analysis\": \"compare\"") != std::string::npos);
    CHECK(trend.find("\"verdict\": \"increase\"") != std::string::npos);
}

TEST_CASE("cli: milling writes envelope artifacts") {
    TempDir dir("vibro_cli");
    const char* scenario = R"({
      "label": "M",
      "sample_rate_hz": 12000.0,
      "duration_s": 2.0,
      "seed": 4,
      "noise_sd": 0.0,
      "tacho": {"rotation_hz": 100.0, "duty": 0.2},
      "axes": {
        "ax": [{"type": "milling", "rotation_hz": 100.0, "teeth": 4,
                "tooth_gains": [1.2, 1.0, 1.0, 1.0],
                "resonance_hz": 2000.0, "resonance_zeta": 0.05}]
      }
    })";
    testutil::write_file(dir.file("mill.json"), scenario);
    testutil::write_file(dir.file("cfg.json"),
                         R"({"bands": {"envelope": [1850, 2550]},
                             "setup": {"rpm": 6000, "teeth": 4}})");
    REQUIRE(run_cli("synth --config " + dir.file("mill.json") + " --out " + dir.file("m.csv")) == 0);
    CHECK(run_cli("milling " + dir.file("m.csv") + " --config " + dir.file("cfg.json") +
                  " --out " + dir.file("m.json") + " --reproducible") == 0);
    CHECK(std::filesystem::exists(dir.file("m_envelope_ax.csv")));
    CHECK(std::filesystem::exists(dir.file("m_envelope_spectrum_ax.csv")));
    const std::string report = testutil::read_file(dir.file("m.json"));
    CHECK(report.find("tooth_asymmetry") != std::string::npos);
}

TEST_CASE("cli: --version exits cleanly") {
    CHECK(run_cli("--version") == 0);
}
