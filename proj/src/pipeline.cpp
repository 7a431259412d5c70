#include "vibro/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vibro/envelope.hpp"
#include "vibro/error.hpp"
#include "vibro/modal.hpp"
#include "vibro/recording_io.hpp"
#include "vibro/rotation.hpp"
#include "vibro/signal.hpp"
#include "vibro/synth.hpp"

namespace vibro {

namespace {

using nlohmann::json;

constexpr const char* kAccelerationAxes[] = {"ax", "ay", "az"};

std::string csv_number(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

void ensure_finite(const json& node, const char* context) {
    if (node.is_number_float() && !std::isfinite(node.get<double>())) {
        throw AnalysisError(std::string("non-finite number in report section ") + context);
    }
    if (node.is_object() || node.is_array()) {
        for (const json& child : node) ensure_finite(child, context);
    }
}

json report_skeleton(const char* analysis, const Recording& recording) {
    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["tool_version"] = kToolVersion;
    report["analysis"] = analysis;
    report["input"] = {
        {"label", recording.label},
        {"sample_rate_hz", recording.sample_rate},
        {"samples", recording.length()},
        {"digest", recording.digest},
    };
    report["warnings"] = json::array();
    return report;
}

json peak_to_json(const ModalPeak& peak) {
    return {
        {"frequency_hz", peak.frequency},
        {"amplitude", peak.amplitude},
        {"band", to_string(peak.band)},
        {"origin", to_string(peak.origin)},
    };
}

std::vector<std::string> acceleration_axes(const Recording& recording) {
    std::vector<std::string> axes;
    for (const char* axis : kAccelerationAxes) {
        if (recording.has_channel(axis)) axes.push_back(axis);
    }
    if (axes.empty()) throw InputError("recording has no acceleration channels (ax/ay/az)");
    return axes;
}

RotationProfile measure_rotation(const Recording& recording, json& report) {
    if (!recording.has_channel("tacho")) {
        throw InputError("this analysis needs a tachometer channel");
    }
    const auto pulses = detect_pulses(recording.channel("tacho"), recording.sample_rate);
    const RotationProfile profile = rotation_frequency(pulses);

    const double variation = profile.speed_variation();
    if (variation > 0.02) {
        report["warnings"].push_back(
            "rotation speed varies by " + csv_number(variation * 100.0) +
            "% over the record; order analysis uses the mean frequency");
    }
    report["rotation"] = {
        {"pulse_count", profile.pulse_times.size()},
        {"mean_hz", profile.mean_frequency},
        {"rpm", profile.rpm()},
        {"speed_variation_pct", variation * 100.0},
    };
    return profile;
}

Spectrum average_spectrum(const Waterfall& waterfall) {
    Spectrum avg = waterfall.spectra.front();
    for (std::size_t b = 1; b < waterfall.spectra.size(); ++b) {
        for (std::size_t k = 0; k < avg.amplitudes.size(); ++k) {
            avg.amplitudes[k] += waterfall.spectra[b].amplitudes[k];
        }
    }
    const double scale = 1.0 / static_cast<double>(waterfall.spectra.size());
    for (double& a : avg.amplitudes) a *= scale;
    return avg;
}

std::string waterfall_csv(const Waterfall& waterfall) {
    std::ostringstream out;
    out << "time_s,frequency_hz,amplitude\n";
    for (std::size_t b = 0; b < waterfall.spectra.size(); ++b) {
        const Spectrum& s = waterfall.spectra[b];
        for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
            out << csv_number(waterfall.block_times[b]) << ',' << csv_number(s.frequency(k)) << ','
                << csv_number(s.amplitudes[k]) << "\n";
        }
    }
    return out.str();
}

// Scenario parsing ---------------------------------------------------------

void require_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
}

double scenario_number(const json& j, const char* key, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("scenario is missing '") + key + "'");
    }
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> render_component(const json& component, double fs, double duration) {
    if (!component.is_object() || !component.contains("type") || !component.at("type").is_string()) {
        throw ConfigError("scenario component needs a 'type' string");
    }
    const std::string type = component.at("type").get<std::string>();

    if (type == "modal_impulse") {
        require_keys(component, "modal_impulse component", {"type", "modes"});
        if (!component.contains("modes") || !component.at("modes").is_array()) {
            throw ConfigError("modal_impulse component needs a 'modes' array");
        }
        synth::ModalModel model;
        for (const json& m : component.at("modes")) {
            require_keys(m, "mode", {"frequency_hz", "zeta", "amplitude"});
            synth::Mode mode;
            mode.frequency = scenario_number(m, "frequency_hz");
            mode.zeta = scenario_number(m, "zeta", 0.0);
            mode.amplitude = scenario_number(m, "amplitude", 1.0);
            model.modes.push_back(mode);
        }
        return synth::modal_impulse(model, fs, duration);
    }
    if (type == "rotor") {
        require_keys(component, "rotor component", {"type", "rotation_hz", "orders"});
        synth::RotorModel model;
        model.rotation_frequency = scenario_number(component, "rotation_hz");
        if (component.contains("orders")) {
            if (!component.at("orders").is_array()) throw ConfigError("'orders' must be an array");
            for (const json& o : component.at("orders")) {
                require_keys(o, "rotor order", {"order", "amplitude", "phase"});
                synth::RotorHarmonic h;
                h.order = static_cast<int>(scenario_number(o, "order"));
                h.amplitude = scenario_number(o, "amplitude");
                h.phase = scenario_number(o, "phase", 0.0);
                model.orders.push_back(h);
            }
        }
        return synth::rotor_signal(model, fs, duration);
    }
    if (type == "milling") {
        require_keys(component, "milling component",
                     {"type", "rotation_hz", "teeth", "tooth_gains", "resonance_hz",
                      "resonance_zeta", "modulation_hz", "modulation_depth"});
        synth::MillingModel model;
        model.rotation_frequency = scenario_number(component, "rotation_hz");
        model.teeth = static_cast<int>(scenario_number(component, "teeth"));
        model.resonance_frequency = scenario_number(component, "resonance_hz");
        model.resonance_zeta = scenario_number(component, "resonance_zeta", 0.05);
        model.modulation_frequency = scenario_number(component, "modulation_hz", 0.0);
        model.modulation_depth = scenario_number(component, "modulation_depth", 0.0);
        if (component.contains("tooth_gains")) {
            if (!component.at("tooth_gains").is_array()) {
                throw ConfigError("'tooth_gains' must be an array of numbers");
            }
            for (const json& g : component.at("tooth_gains")) {
                if (!g.is_number()) throw ConfigError("'tooth_gains' must be an array of numbers");
                model.tooth_gains.push_back(g.get<double>());
            }
        }
        return synth::milling_signal(model, fs, duration);
    }
    throw ConfigError("unknown scenario component type: " + type);
}

} // namespace

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError(path + " is not valid JSON: " + e.what());
    }
    return j;
}

Recording synthesize_scenario(const json& scenario) {
    require_keys(scenario, "scenario",
                 {"label", "sample_rate_hz", "duration_s", "seed", "noise_sd", "tacho", "axes"});
    const double fs = scenario_number(scenario, "sample_rate_hz");
    const double duration = scenario_number(scenario, "duration_s");
    const auto seed = static_cast<std::uint64_t>(scenario_number(scenario, "seed", 0.0));
    const double noise_sd = scenario_number(scenario, "noise_sd", 0.0);

    Recording recording;
    recording.sample_rate = fs;
    if (scenario.contains("label")) {
        if (!scenario.at("label").is_string()) throw ConfigError("'label' must be a string");
        recording.label = scenario.at("label").get<std::string>();
    }

    const auto n = static_cast<std::size_t>(std::llround(fs * duration));
    if (n < 2) throw ConfigError("scenario duration * sample_rate must be at least 2 samples");

    const json axes = scenario.contains("axes") ? scenario.at("axes") : json::object();
    require_keys(axes, "axes", {"ax", "ay", "az"});

    std::uint64_t axis_index = 0;
    for (const char* axis : kAccelerationAxes) {
        std::vector<std::vector<double>> components;
        if (axes.contains(axis)) {
            if (!axes.at(axis).is_array()) throw ConfigError("axis component list must be an array");
            for (const json& component : axes.at(axis)) {
                components.push_back(render_component(component, fs, duration));
            }
        }
        if (components.empty()) components.emplace_back(n, 0.0);
        // Per-axis noise stream: offset the seed so axes stay independent.
        recording.channels.emplace_back(
            axis, synth::mix_and_noise(components, noise_sd, seed + axis_index));
        ++axis_index;
    }

    if (scenario.contains("tacho")) {
        const json& t = scenario.at("tacho");
        require_keys(t, "tacho", {"rotation_hz", "duty"});
        recording.channels.emplace_back(
            "tacho", synth::tacho_pulses(scenario_number(t, "rotation_hz"), fs, duration,
                                         scenario_number(t, "duty", 0.2)));
    }

    recording.validate();
    recording.digest = fnv1a64_hex(recording.channels.front().second.data(),
                                   recording.channels.front().second.size() * sizeof(double));
    return recording;
}

AnalysisResult run_impact(const Recording& recording, const AnalysisConfig& config) {
    recording.validate();
    config.validate();
    if (recording.length() < config.waterfall.block_size) {
        throw AnalysisError("recording is shorter than one waterfall block (" +
                            std::to_string(config.waterfall.block_size) + " samples)");
    }

    AnalysisResult result;
    result.report = report_skeleton("impact", recording);
    result.report["settings"] = {
        {"waterfall_block_size", config.waterfall.block_size},
        {"waterfall_overlap", config.waterfall.overlap},
        {"window", "hann"},
        {"mains_provisional", true},
    };
    result.report["warnings"].push_back(
        "mains classification is provisional for a single configuration; run compare across "
        "configurations for the full rule");

    json axes_json = json::object();
    for (const std::string& axis : acceleration_axes(recording)) {
        const Waterfall wf = waterfall(recording.channel(axis), recording.sample_rate,
                                       config.waterfall.block_size, config.waterfall.overlap);
        const Spectrum averaged = average_spectrum(wf);

        std::vector<ModalPeak> peaks =
            detect_peaks(averaged, config.thresholds.peak_floor, config.thresholds.prominence);
        for (ModalPeak& p : peaks) {
            p.band = classify_band(p.frequency, config.bands);
            p.axis = axis;
            p.config = recording.label;
        }
        std::vector<ConfigPeaks> annotated =
            reject_mains({{recording.label, std::move(peaks)}}, config.mains);

        json peaks_json = json::array();
        for (const ModalPeak& p : annotated.front().second) peaks_json.push_back(peak_to_json(p));
        axes_json[axis] = {{"peaks", peaks_json}};

        result.artifacts.push_back({"waterfall_" + axis + ".csv", waterfall_csv(wf)});
    }
    result.report["axes"] = axes_json;

    ensure_finite(result.report, "impact");
    return result;
}

AnalysisResult run_compare(const std::vector<json>& impact_reports, const AnalysisConfig& config) {
    if (impact_reports.size() < 2) throw InputError("compare needs at least two impact reports");
    config.validate();

    struct LoadedReport {
        std::string label;
        std::map<std::string, std::vector<ModalPeak>> peaks_by_axis;
    };
    std::vector<LoadedReport> loaded;
    std::set<std::string> labels;
    std::set<std::string> axis_names;

    for (const json& report : impact_reports) {
        validate_report(report);
        if (report.at("analysis") != "impact") {
            throw InputError("compare expects impact reports");
        }
        LoadedReport lr;
        try {
            lr.label = report.at("input").at("label").get<std::string>();
            if (lr.label.empty()) throw InputError("impact report has an empty configuration label");
            if (!labels.insert(lr.label).second) {
                throw InputError("duplicate configuration label '" + lr.label + "'");
            }
            for (const auto& [axis, payload] : report.at("axes").items()) {
                std::vector<ModalPeak> peaks;
                for (const json& p : payload.at("peaks")) {
                    ModalPeak peak;
                    peak.frequency = p.at("frequency_hz").get<double>();
                    peak.amplitude = p.at("amplitude").get<double>();
                    peak.band = classify_band(peak.frequency, config.bands);
                    peak.axis = axis;
                    peak.config = lr.label;
                    peaks.push_back(peak);
                }
                lr.peaks_by_axis[axis] = std::move(peaks);
                axis_names.insert(axis);
            }
        } catch (const json::exception& e) {
            throw InputError(std::string("malformed impact report: ") + e.what());
        }
        loaded.push_back(std::move(lr));
    }
    for (const LoadedReport& lr : loaded) {
        if (lr.peaks_by_axis.size() != axis_names.size()) {
            throw InputError("impact reports do not share the same axes");
        }
    }

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["tool_version"] = kToolVersion;
    report["analysis"] = "compare";
    report["warnings"] = json::array();
    json configs = json::array();
    json inputs = json::array();
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        configs.push_back(loaded[i].label);
        inputs.push_back({{"label", loaded[i].label},
                          {"digest", impact_reports[i].at("input").value("digest", "")}});
    }
    report["configs"] = configs;
    report["inputs"] = inputs;

    const std::string& reference = loaded.front().label;
    json axes_json = json::object();
    for (const std::string& axis : axis_names) {
        std::vector<ConfigPeaks> by_config;
        for (const LoadedReport& lr : loaded) {
            by_config.emplace_back(lr.label, lr.peaks_by_axis.at(axis));
        }
        by_config = reject_mains(std::move(by_config), config.mains);

        json peaks_json = json::object();
        std::vector<ConfigPeaks> structural;
        for (const ConfigPeaks& cp : by_config) {
            json list = json::array();
            std::vector<ModalPeak> kept;
            for (const ModalPeak& p : cp.second) {
                list.push_back(peak_to_json(p));
                if (p.origin == PeakOrigin::structural) kept.push_back(p);
            }
            peaks_json[cp.first] = list;
            structural.emplace_back(cp.first, std::move(kept));
        }

        std::vector<ModeTrack> tracks = track_modes(structural, config.bands);
        for (ModeTrack& t : tracks) t.axis = axis;

        json tracks_json = json::array();
        json stiffness_json = json::array();
        for (const ModeTrack& track : tracks) {
            json entries = json::array();
            for (const TrackEntry& e : track.entries) {
                entries.push_back({{"config", e.config},
                                   {"frequency_hz", e.frequency},
                                   {"amplitude", e.amplitude}});
            }
            tracks_json.push_back(
                {{"entries", entries}, {"trend", to_string(track.trend)}, {"partial", track.partial}});

            const bool has_reference = std::any_of(
                track.entries.begin(), track.entries.end(),
                [&](const TrackEntry& e) { return e.config == reference; });
            if (!has_reference) continue;
            const StiffnessTrend st = stiffness_trend(track, reference);
            json st_entries = json::array();
            for (const StiffnessEntry& e : st.entries) {
                st_entries.push_back(
                    {{"config", e.config}, {"ratio", e.ratio}, {"shift_pct", e.shift_pct}});
            }
            stiffness_json.push_back({{"reference", st.reference},
                                      {"entries", st_entries},
                                      {"verdict", verdict_string(st.verdict)}});
        }
        axes_json[axis] = {
            {"peaks_by_config", peaks_json},
            {"tracks", tracks_json},
            {"stiffness", stiffness_json},
        };
    }
    report["axes"] = axes_json;

    ensure_finite(report, "compare");
    return {report, {}};
}

AnalysisResult run_spindle(const Recording& recording, const AnalysisConfig& config) {
    recording.validate();
    config.validate();

    AnalysisResult result;
    result.report = report_skeleton("spindle", recording);
    const RotationProfile profile = measure_rotation(recording, result.report);

    json axes_json = json::object();
    for (const std::string& axis : acceleration_axes(recording)) {
        const Spectrum spectrum =
            amplitude_spectrum(recording.channel(axis), recording.sample_rate);
        const OrderSpectrum orders = order_spectrum(spectrum, profile.mean_frequency, 10);
        const DefectFlags flags =
            diagnose(orders, spectrum, config.modal_frequencies, config.diagnose_thresholds());

        json orders_json = json::array();
        for (const auto& [k, amplitude] : orders.orders) {
            orders_json.push_back({{"k", k},
                                   {"frequency_hz", k * profile.mean_frequency},
                                   {"amplitude", amplitude}});
        }
        json matches = json::array();
        for (const ResonanceMatch& m : flags.resonance_matches) {
            matches.push_back({{"peak_hz", m.peak_frequency},
                               {"matched_modal_hz", m.modal_frequency},
                               {"separation_hz", m.separation}});
        }
        axes_json[axis] = {
            {"orders", orders_json},
            {"defects",
             {{"imbalance", {{"flagged", flags.imbalance}, {"severity", flags.imbalance_severity}}},
              {"misalignment",
               {{"flagged", flags.misalignment}, {"ratio", flags.misalignment_ratio}}},
              {"resonance_matches", matches}}},
        };
    }
    result.report["axes"] = axes_json;

    if (config.setup && config.setup->cutting_speed_m_min) {
        const auto computed = config.setup->computed_cutting_speed_m_min();
        if (computed) {
            const double declared = *config.setup->cutting_speed_m_min;
            const double rel = std::abs(*computed - declared) / declared;
            result.report["setup_check"] = {
                {"computed_cutting_speed_m_min", *computed},
                {"declared_cutting_speed_m_min", declared},
                {"relative_error_pct", rel * 100.0},
                {"consistent", rel <= 0.01},
            };
            if (rel > 0.01) {
                result.report["warnings"].push_back(
                    "setup inconsistency: pi*D*n gives " + csv_number(*computed) +
                    " m/min but the declared cutting speed is " + csv_number(declared) + " m/min");
            }
        }
    }

    ensure_finite(result.report, "spindle");
    return result;
}

AnalysisResult run_milling(const Recording& recording, const AnalysisConfig& config) {
    recording.validate();
    config.validate();
    if (!(config.envelope_band.high < recording.sample_rate / 2.0)) {
        throw ConfigError("envelope band reaches Nyquist for this recording");
    }

    AnalysisResult result;
    result.report = report_skeleton("milling", recording);
    const RotationProfile profile = measure_rotation(recording, result.report);
    result.report["envelope_band_hz"] = {config.envelope_band.low, config.envelope_band.high};

    // The configured modal list filtered to the low-frequency band is what
    // modulation peaks are attributed against.
    std::vector<double> lfr_modes;
    for (double f : config.modal_frequencies) {
        if (classify_band(f, config.bands) == BandClass::lfr) lfr_modes.push_back(f);
    }

    bool resolution_warned = false;
    json axes_json = json::object();
    for (const std::string& axis : acceleration_axes(recording)) {
        EnvelopeAnalysis analysis =
            envelope_signal(recording.channel(axis), recording.sample_rate,
                            config.envelope_band.low, config.envelope_band.high);
        analysis.axis = axis;
        const Spectrum env_spec = envelope_spectrum(analysis);
        if (!resolution_warned && env_spec.bin_width > 1.0) {
            result.report["warnings"].push_back(
                "envelope spectrum resolution is " + csv_number(env_spec.bin_width) +
                " Hz; records of at least 1 s resolve the low-frequency modulation region");
            resolution_warned = true;
        }

        const double tol = std::max(1.0, env_spec.bin_width);
        const auto modulation =
            detect_modulation(env_spec, profile.mean_frequency, lfr_modes, tol,
                              config.thresholds.peak_floor, config.thresholds.prominence);
        json mods = json::array();
        for (const ModulationPeak& m : modulation) {
            json entry = {{"frequency_hz", m.frequency},
                          {"amplitude", m.amplitude},
                          {"attribution", to_string(m.attribution)}};
            if (m.attribution == ModulationSource::rotation_harmonic) entry["order"] = m.order;
            mods.push_back(entry);
        }

        json axis_json = {{"modulation_peaks", mods}};
        if (config.setup && config.setup->teeth >= 2) {
            const ToothAsymmetryReport tooth =
                tooth_asymmetry(env_spec, profile.mean_frequency, config.setup->teeth, {},
                                config.thresholds.asymmetry);
            json amps = json::array();
            for (const auto& [k, amplitude] : tooth.order_amplitudes) {
                amps.push_back({{"k", k}, {"amplitude", amplitude}});
            }
            json tooth_json = {{"order_amplitudes", amps},
                               {"tooth_pass_hz", tooth.tooth_pass_frequency},
                               {"asymmetry_index", tooth.asymmetry_index},
                               {"threshold", tooth.threshold},
                               {"flagged", tooth.flagged}};
            if (tooth.tooth_pass_amplitude) {
                tooth_json["tooth_pass_amplitude"] = *tooth.tooth_pass_amplitude;
            }
            axis_json["tooth_asymmetry"] = tooth_json;
        } else {
            result.report["warnings"].push_back(
                "no tooth count in the setup config; tooth-asymmetry analysis skipped");
        }
        axes_json[axis] = axis_json;

        std::ostringstream env_csv;
        env_csv << "t_s,envelope,envelope_centered\n";
        for (std::size_t i = 0; i < analysis.envelope.size(); ++i) {
            env_csv << csv_number(static_cast<double>(i) / recording.sample_rate) << ','
                    << csv_number(analysis.envelope[i]) << ','
                    << csv_number(analysis.envelope_centered[i]) << "\n";
        }
        result.artifacts.push_back({"envelope_" + axis + ".csv", env_csv.str()});

        std::ostringstream spec_csv;
        spec_csv << "frequency_hz,amplitude\n";
        for (std::size_t k = 0; k < env_spec.amplitudes.size(); ++k) {
            spec_csv << csv_number(env_spec.frequency(k)) << ','
                     << csv_number(env_spec.amplitudes[k]) << "\n";
        }
        result.artifacts.push_back({"envelope_spectrum_" + axis + ".csv", spec_csv.str()});
    }
    result.report["axes"] = axes_json;

    ensure_finite(result.report, "milling");
    return result;
}

std::string serialize_report(const json& report, bool reproducible) {
    json out = report;
    if (!reproducible) {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tm_utc{};
        gmtime_r(&t, &tm_utc);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        out["generated_utc"] = buf;
    }
    return out.dump(2) + "\n";
}

void validate_report(const json& report) {
    if (!report.is_object()) throw InputError("report must be a JSON object");
    for (const char* key : {"schema_version", "tool_version", "analysis", "warnings"}) {
        if (!report.contains(key)) {
            throw InputError(std::string("report is missing '") + key + "'");
        }
    }
    if (report.at("schema_version") != kReportSchemaVersion) {
        throw InputError("unsupported report schema version");
    }
    const std::string analysis = report.at("analysis").get<std::string>();
    if (analysis != "impact" && analysis != "spindle" && analysis != "milling" &&
        analysis != "compare") {
        throw InputError("unknown report analysis type: " + analysis);
    }
    if (analysis != "compare") {
        if (!report.contains("input") || !report.at("input").contains("label")) {
            throw InputError("report is missing its input section");
        }
    }
    if (!report.contains("axes")) throw InputError("report is missing 'axes'");
    ensure_finite(report, "report");
}

} // namespace vibro
