#include "vibro/vibro.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "vibro/config.hpp"
#include "vibro/error.hpp"
#include "vibro/pipeline.hpp"
#include "vibro/recording_io.hpp"

struct vibro_recording {
    vibro::Recording recording;
};

struct vibro_config {
    vibro::AnalysisConfig config;
};

struct vibro_result {
    vibro::AnalysisResult result;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
vibro_status guarded(Fn&& fn) {
    try {
        fn();
        return VIBRO_OK;
    } catch (const vibro::Error& e) {
        set_error(e.what());
        return static_cast<vibro_status>(static_cast<int>(e.status()));
    } catch (const std::exception& e) {
        set_error(e.what());
        return VIBRO_ERROR_ANALYSIS;
    }
}

vibro_status require(bool ok, const char* message) {
    if (!ok) {
        set_error(message);
        return VIBRO_ERROR_INPUT;
    }
    return VIBRO_OK;
}

char* copy_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out != nullptr) std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

using AnalysisFn = vibro::AnalysisResult (*)(const vibro::Recording&, const vibro::AnalysisConfig&);

vibro_status run_analysis(AnalysisFn fn, const vibro_recording* recording,
                          const vibro_config* config, vibro_result** out, const char* name) {
    if (auto st = require(recording && out, name); st != VIBRO_OK) return st;
    *out = nullptr;
    return guarded([&] {
        const vibro::AnalysisConfig defaults;
        const vibro::AnalysisConfig& cfg = config ? config->config : defaults;
        *out = new vibro_result{fn(recording->recording, cfg)};
    });
}

} // namespace

extern "C" {

const char* vibro_version(void) { return vibro::kToolVersion; }

const char* vibro_last_error(void) { return g_last_error.c_str(); }

vibro_status vibro_recording_open(const char* path, vibro_recording** out) {
    if (auto st = require(path && out, "vibro_recording_open: null argument"); st != VIBRO_OK) return st;
    *out = nullptr;
    return guarded([&] { *out = new vibro_recording{vibro::parse_recording(path)}; });
}

vibro_status vibro_recording_save(const vibro_recording* recording, const char* path) {
    if (auto st = require(recording && path, "vibro_recording_save: null argument"); st != VIBRO_OK) {
        return st;
    }
    return guarded([&] { vibro::write_recording(recording->recording, path); });
}

void vibro_recording_close(vibro_recording* recording) { delete recording; }

const char* vibro_recording_label(const vibro_recording* recording) {
    return recording ? recording->recording.label.c_str() : "";
}

double vibro_recording_sample_rate(const vibro_recording* recording) {
    return recording ? recording->recording.sample_rate : 0.0;
}

size_t vibro_recording_sample_count(const vibro_recording* recording) {
    return recording ? recording->recording.length() : 0;
}

size_t vibro_recording_channel_count(const vibro_recording* recording) {
    return recording ? recording->recording.channels.size() : 0;
}

const char* vibro_recording_channel_name(const vibro_recording* recording, size_t index) {
    if (!recording || index >= recording->recording.channels.size()) return nullptr;
    return recording->recording.channels[index].first.c_str();
}

const double* vibro_recording_channel(const vibro_recording* recording, const char* name,
                                      size_t* count) {
    if (count) *count = 0;
    if (!recording || !name) return nullptr;
    for (const auto& [channel_name, samples] : recording->recording.channels) {
        if (channel_name == name) {
            if (count) *count = samples.size();
            return samples.data();
        }
    }
    return nullptr;
}

vibro_status vibro_config_default(vibro_config** out) {
    if (auto st = require(out != nullptr, "vibro_config_default: null argument"); st != VIBRO_OK) {
        return st;
    }
    *out = nullptr;
    return guarded([&] { *out = new vibro_config{}; });
}

vibro_status vibro_config_open(const char* path, vibro_config** out) {
    if (auto st = require(path && out, "vibro_config_open: null argument"); st != VIBRO_OK) return st;
    *out = nullptr;
    return guarded([&] { *out = new vibro_config{vibro::AnalysisConfig::load(path)}; });
}

void vibro_config_close(vibro_config* config) { delete config; }

vibro_status vibro_synthesize(const char* scenario_path, vibro_recording** out) {
    if (auto st = require(scenario_path && out, "vibro_synthesize: null argument"); st != VIBRO_OK) {
        return st;
    }
    *out = nullptr;
    return guarded([&] {
        *out = new vibro_recording{
            vibro::synthesize_scenario(vibro::load_json_file(scenario_path))};
    });
}

vibro_status vibro_analyze_impact(const vibro_recording* recording, const vibro_config* config,
                                  vibro_result** out) {
    return run_analysis(vibro::run_impact, recording, config, out,
                        "vibro_analyze_impact: null argument");
}

vibro_status vibro_analyze_spindle(const vibro_recording* recording, const vibro_config* config,
                                   vibro_result** out) {
    return run_analysis(vibro::run_spindle, recording, config, out,
                        "vibro_analyze_spindle: null argument");
}

vibro_status vibro_analyze_milling(const vibro_recording* recording, const vibro_config* config,
                                   vibro_result** out) {
    return run_analysis(vibro::run_milling, recording, config, out,
                        "vibro_analyze_milling: null argument");
}

vibro_status vibro_compare_reports(const char* const* report_paths, size_t count,
                                   const vibro_config* config, vibro_result** out) {
    if (auto st = require(report_paths && out, "vibro_compare_reports: null argument");
        st != VIBRO_OK) {
        return st;
    }
    *out = nullptr;
    return guarded([&] {
        std::vector<nlohmann::json> reports;
        reports.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (!report_paths[i]) throw vibro::InputError("compare: null report path");
            reports.push_back(vibro::load_json_file(report_paths[i]));
        }
        const vibro::AnalysisConfig defaults;
        const vibro::AnalysisConfig& cfg = config ? config->config : defaults;
        *out = new vibro_result{vibro::run_compare(reports, cfg)};
    });
}

vibro_status vibro_result_report_json(const vibro_result* result, int reproducible,
                                      char** out_json) {
    if (auto st = require(result && out_json, "vibro_result_report_json: null argument");
        st != VIBRO_OK) {
        return st;
    }
    *out_json = nullptr;
    return guarded([&] {
        const std::string text = vibro::serialize_report(result->result.report, reproducible != 0);
        *out_json = copy_string(text);
        if (*out_json == nullptr) throw std::bad_alloc();
    });
}

size_t vibro_result_artifact_count(const vibro_result* result) {
    return result ? result->result.artifacts.size() : 0;
}

const char* vibro_result_artifact_name(const vibro_result* result, size_t index) {
    if (!result || index >= result->result.artifacts.size()) return nullptr;
    return result->result.artifacts[index].name.c_str();
}

const char* vibro_result_artifact_data(const vibro_result* result, size_t index) {
    if (!result || index >= result->result.artifacts.size()) return nullptr;
    return result->result.artifacts[index].csv.c_str();
}

void vibro_result_close(vibro_result* result) { delete result; }

void vibro_string_free(char* text) { std::free(text); }

} // extern "C"
