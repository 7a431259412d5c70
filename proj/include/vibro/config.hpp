#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vibro/modal.hpp"
#include "vibro/rotation.hpp"

namespace vibro {

struct ThresholdConfig {
    double peak_floor = 5.0;
    double prominence = 0.1;
    double imbalance_factor = 5.0;
    double misalignment_ratio = 0.5;
    double asymmetry = 0.2;
    double resonance_tol_pct = 2.0;
};

struct EnvelopeBand {
    double low = 2000.0;
    double high = 3000.0;
};

struct WaterfallConfig {
    std::size_t block_size = 2000;
    double overlap = 0.0;
};

/// Analysis configuration; every field is optional in the file and defaults
/// to the values above.
struct AnalysisConfig {
    BandConfig bands;
    EnvelopeBand envelope_band;
    MainsConfig mains;
    ThresholdConfig thresholds;
    WaterfallConfig waterfall;
    std::optional<MachiningSetup> setup;
    std::vector<double> modal_frequencies; // known self-excited frequencies

    static AnalysisConfig from_json(const nlohmann::json& j);
    static AnalysisConfig load(const std::string& path);

    void validate() const; // throws ConfigError

    DiagnoseThresholds diagnose_thresholds() const;
};

} // namespace vibro
