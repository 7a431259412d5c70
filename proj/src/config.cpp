#include "vibro/config.hpp"

#include <fstream>

#include "vibro/error.hpp"

namespace vibro {

namespace {

using nlohmann::json;

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

double number_at(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

BandRange band_at(const json& j, const char* key, BandRange fallback) {
    if (!j.contains(key)) return fallback;
    const json& b = j.at(key);
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
        throw ConfigError(std::string("band '") + key + "' must be a [low, high] pair");
    }
    return {b[0].get<double>(), b[1].get<double>()};
}

} // namespace

AnalysisConfig AnalysisConfig::from_json(const json& j) {
    AnalysisConfig cfg;
    require_keys(j, "config",
                 {"bands", "mains", "thresholds", "setup", "modal_frequencies", "waterfall"});

    if (j.contains("bands")) {
        const json& b = j.at("bands");
        require_keys(b, "bands", {"lfr", "hfr", "envelope"});
        cfg.bands.lfr = band_at(b, "lfr", cfg.bands.lfr);
        cfg.bands.hfr = band_at(b, "hfr", cfg.bands.hfr);
        const BandRange env = band_at(b, "envelope", {cfg.envelope_band.low, cfg.envelope_band.high});
        cfg.envelope_band = {env.low, env.high};
    }
    if (j.contains("mains")) {
        const json& m = j.at("mains");
        require_keys(m, "mains", {"frequency", "harmonics", "tol"});
        cfg.mains.frequency = number_at(m, "frequency", cfg.mains.frequency);
        cfg.mains.harmonics = static_cast<int>(number_at(m, "harmonics", cfg.mains.harmonics));
        cfg.mains.tol = number_at(m, "tol", cfg.mains.tol);
    }
    if (j.contains("thresholds")) {
        const json& t = j.at("thresholds");
        require_keys(t, "thresholds",
                     {"peak_floor", "prominence", "imbalance_factor", "misalignment_ratio",
                      "asymmetry", "resonance_tol_pct"});
        cfg.thresholds.peak_floor = number_at(t, "peak_floor", cfg.thresholds.peak_floor);
        cfg.thresholds.prominence = number_at(t, "prominence", cfg.thresholds.prominence);
        cfg.thresholds.imbalance_factor =
            number_at(t, "imbalance_factor", cfg.thresholds.imbalance_factor);
        cfg.thresholds.misalignment_ratio =
            number_at(t, "misalignment_ratio", cfg.thresholds.misalignment_ratio);
        cfg.thresholds.asymmetry = number_at(t, "asymmetry", cfg.thresholds.asymmetry);
        cfg.thresholds.resonance_tol_pct =
            number_at(t, "resonance_tol_pct", cfg.thresholds.resonance_tol_pct);
    }
    if (j.contains("waterfall")) {
        const json& w = j.at("waterfall");
        require_keys(w, "waterfall", {"block_size", "overlap"});
        cfg.waterfall.block_size =
            static_cast<std::size_t>(number_at(w, "block_size", static_cast<double>(cfg.waterfall.block_size)));
        cfg.waterfall.overlap = number_at(w, "overlap", cfg.waterfall.overlap);
    }
    if (j.contains("setup")) {
        const json& s = j.at("setup");
        require_keys(s, "setup",
                     {"rpm", "teeth", "tool_diameter_mm", "cutting_speed_m_min", "feed_mm_min"});
        MachiningSetup setup;
        setup.spindle_rpm = number_at(s, "rpm", 0.0);
        setup.teeth = static_cast<int>(number_at(s, "teeth", 1.0));
        setup.tool_diameter_mm = number_at(s, "tool_diameter_mm", 0.0);
        if (s.contains("cutting_speed_m_min")) {
            setup.cutting_speed_m_min = number_at(s, "cutting_speed_m_min", 0.0);
        }
        if (s.contains("feed_mm_min")) setup.feed_mm_min = number_at(s, "feed_mm_min", 0.0);
        cfg.setup = setup;
    }
    if (j.contains("modal_frequencies")) {
        const json& m = j.at("modal_frequencies");
        if (!m.is_array()) throw ConfigError("'modal_frequencies' must be an array of numbers");
        for (const json& v : m) {
            if (!v.is_number()) throw ConfigError("'modal_frequencies' must be an array of numbers");
            cfg.modal_frequencies.push_back(v.get<double>());
        }
    }

    cfg.validate();
    return cfg;
}

AnalysisConfig AnalysisConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

void AnalysisConfig::validate() const {
    bands.validate();
    if (!(envelope_band.low > 0.0 && envelope_band.low < envelope_band.high)) {
        throw ConfigError("envelope band is inverted");
    }
    if (!(mains.frequency > 0.0)) throw ConfigError("mains frequency must be positive");
    if (mains.harmonics < 1) throw ConfigError("mains harmonics must be at least 1");
    if (!(mains.tol > 0.0)) throw ConfigError("mains tolerance must be positive");
    if (thresholds.peak_floor < 1.0) throw ConfigError("peak_floor must be at least 1");
    if (!(thresholds.prominence >= 0.0 && thresholds.prominence < 1.0)) {
        throw ConfigError("prominence must lie in [0, 1)");
    }
    if (waterfall.block_size < 2) throw ConfigError("waterfall block size must be at least 2");
    if (!(waterfall.overlap >= 0.0 && waterfall.overlap < 1.0)) {
        throw ConfigError("waterfall overlap must lie in [0, 1)");
    }
    if (setup) setup->validate();
    for (double f : modal_frequencies) {
        if (!(f > 0.0)) throw ConfigError("modal frequencies must be positive");
    }
}

DiagnoseThresholds AnalysisConfig::diagnose_thresholds() const {
    DiagnoseThresholds t;
    t.imbalance_factor = thresholds.imbalance_factor;
    t.misalignment_ratio = thresholds.misalignment_ratio;
    t.resonance_tol_pct = thresholds.resonance_tol_pct;
    t.peak_floor = thresholds.peak_floor;
    t.peak_prominence = thresholds.prominence;
    return t;
}

} // namespace vibro
