// vibro: vibration diagnostics for robotic machining.
//
// Subcommands mirror the measurement stages: synth (oracle recordings),
// impact (self-excited frequencies), spindle (rotation-synchronized orders),
// milling (envelope method), compare (cross-configuration trends).
//
// Exit codes: 0 success, 1 input/parse error, 2 config error, 3 analysis
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vibro/vibro.h"

namespace {

namespace fs = std::filesystem;

int fail(vibro_status status) {
    std::cerr << "error: " << vibro_last_error() << "\n";
    return static_cast<int>(status);
}

struct RecordingHandle {
    vibro_recording* ptr = nullptr;
    ~RecordingHandle() { vibro_recording_close(ptr); }
};

struct ConfigHandle {
    vibro_config* ptr = nullptr;
    ~ConfigHandle() { vibro_config_close(ptr); }
};

struct ResultHandle {
    vibro_result* ptr = nullptr;
    ~ResultHandle() { vibro_result_close(ptr); }
};

int load_config(const std::string& path, ConfigHandle& config) {
    const vibro_status status = path.empty() ? vibro_config_default(&config.ptr)
                                             : vibro_config_open(path.c_str(), &config.ptr);
    return status == VIBRO_OK ? 0 : fail(status);
}

// Artifacts land next to the report: <out stem>_<artifact name>.
int write_outputs(const ResultHandle& result, const std::string& out_path, bool reproducible) {
    char* report = nullptr;
    if (const vibro_status status = vibro_result_report_json(result.ptr, reproducible, &report);
        status != VIBRO_OK) {
        return fail(status);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        vibro_string_free(report);
        return 1;
    }
    out << report;
    vibro_string_free(report);
    if (!out.flush()) {
        std::cerr << "error: failed while writing " << out_path << "\n";
        return 1;
    }

    const fs::path base(out_path);
    const std::string stem = (base.parent_path() / base.stem()).string();
    for (size_t i = 0; i < vibro_result_artifact_count(result.ptr); ++i) {
        const std::string artifact_path =
            stem + "_" + vibro_result_artifact_name(result.ptr, i);
        std::ofstream artifact(artifact_path, std::ios::binary);
        if (!artifact) {
            std::cerr << "error: cannot write " << artifact_path << "\n";
            return 1;
        }
        artifact << vibro_result_artifact_data(result.ptr, i);
        if (!artifact.flush()) {
            std::cerr << "error: failed while writing " << artifact_path << "\n";
            return 1;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vibration diagnostics for robotic machining"};
    app.require_subcommand(1);
    app.fallthrough(); // --config/--out/--reproducible may follow the subcommand
    app.set_version_flag("--version", std::string(vibro_version()));

    std::string config_path;
    std::string out_path;
    bool reproducible = false;
    app.add_option("--config", config_path, "analysis / scenario config file (JSON)")
        ->configurable(false);
    app.add_option("--out", out_path, "output path")->required();
    app.add_flag("--reproducible", reproducible, "omit timestamps so outputs are byte-stable");

    auto* synth = app.add_subcommand("synth", "generate a synthetic recording from a scenario");
    auto* impact = app.add_subcommand("impact", "identify self-excited frequencies of one recording");
    auto* spindle = app.add_subcommand("spindle", "diagnose rotation orders against the tachometer");
    auto* milling = app.add_subcommand("milling", "envelope analysis of a milling recording");
    auto* compare = app.add_subcommand("compare", "track modes across impact reports");

    std::string recording_path;
    impact->add_option("recording", recording_path, "recording CSV")->required();
    spindle->add_option("recording", recording_path, "recording CSV")->required();
    milling->add_option("recording", recording_path, "recording CSV")->required();

    std::vector<std::string> report_paths;
    compare->add_option("reports", report_paths, "two or more impact report JSON files")
        ->expected(2, -1)
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage problems are input errors
    }

    if (synth->parsed()) {
        if (config_path.empty()) {
            std::cerr << "error: synth needs --config <scenario.json>\n";
            return 1;
        }
        RecordingHandle recording;
        if (const vibro_status status = vibro_synthesize(config_path.c_str(), &recording.ptr);
            status != VIBRO_OK) {
            return fail(status);
        }
        if (const vibro_status status = vibro_recording_save(recording.ptr, out_path.c_str());
            status != VIBRO_OK) {
            return fail(status);
        }
        return 0;
    }

    ConfigHandle config;
    if (const int code = load_config(config_path, config); code != 0) return code;

    ResultHandle result;
    if (compare->parsed()) {
        std::vector<const char*> paths;
        paths.reserve(report_paths.size());
        for (const std::string& p : report_paths) paths.push_back(p.c_str());
        if (const vibro_status status =
                vibro_compare_reports(paths.data(), paths.size(), config.ptr, &result.ptr);
            status != VIBRO_OK) {
            return fail(status);
        }
        return write_outputs(result, out_path, reproducible);
    }

    RecordingHandle recording;
    if (const vibro_status status = vibro_recording_open(recording_path.c_str(), &recording.ptr);
        status != VIBRO_OK) {
        return fail(status);
    }

    vibro_status status = VIBRO_ERROR_INPUT;
    if (impact->parsed()) {
        status = vibro_analyze_impact(recording.ptr, config.ptr, &result.ptr);
    } else if (spindle->parsed()) {
        status = vibro_analyze_spindle(recording.ptr, config.ptr, &result.ptr);
    } else if (milling->parsed()) {
        status = vibro_analyze_milling(recording.ptr, config.ptr, &result.ptr);
    }
    if (status != VIBRO_OK) return fail(status);
    return write_outputs(result, out_path, reproducible);
}
