#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vibro/config.hpp"
#include "vibro/types.hpp"

namespace vibro {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

/// Plot-ready CSV emitted alongside a report (waterfalls, envelopes, ...).
struct Artifact {
    std::string name;
    std::string csv;
};

struct AnalysisResult {
    nlohmann::json report;
    std::vector<Artifact> artifacts;
};

/// Waterfall per axis, peak detection on the time-averaged spectrum, mains
/// annotation (single-configuration proximity rule, marked provisional) and
/// band classification.
AnalysisResult run_impact(const Recording& recording, const AnalysisConfig& config);

/// Tachometer pulse detection, rotation profile, order spectrum to order 10,
/// defect diagnosis against the configured modal list, and the pi*D*n cutting
/// speed consistency check when the setup provides both values.
AnalysisResult run_spindle(const Recording& recording, const AnalysisConfig& config);

/// Per-axis envelope analysis over the configured resonance band, modulation
/// detection against the configured low-frequency modal list, and the tooth
/// asymmetry report when the setup names a tooth count.
AnalysisResult run_milling(const Recording& recording, const AnalysisConfig& config);

/// Cross-configuration analysis over two or more impact reports: full mains
/// rejection, mode tracking, stiffness trends per axis.
AnalysisResult run_compare(const std::vector<nlohmann::json>& impact_reports,
                           const AnalysisConfig& config);

/// Builds a Recording from a scenario description (see README for the
/// schema); deterministic for a fixed seed.
Recording synthesize_scenario(const nlohmann::json& scenario);

nlohmann::json load_json_file(const std::string& path);

/// Final serialized form; a generation timestamp is added unless reproducible
/// output was requested.
std::string serialize_report(const nlohmann::json& report, bool reproducible);

/// Schema check used by tests and by compare when re-reading reports.
void validate_report(const nlohmann::json& report);

} // namespace vibro
