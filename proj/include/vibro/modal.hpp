#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vibro/types.hpp"

namespace vibro {

enum class BandClass { lfr, hfr, out_of_band };
enum class PeakOrigin { structural, external };
enum class Trend { increasing, decreasing, flat };

const char* to_string(BandClass band);
const char* to_string(PeakOrigin origin);
const char* to_string(Trend trend);          // increasing / decreasing / flat
const char* verdict_string(Trend verdict);   // increase / decrease / flat

struct BandRange {
    double low = 0.0;
    double high = 0.0;
};

struct BandConfig {
    BandRange lfr{0.0, 250.0};
    BandRange hfr{1200.0, 3600.0};

    void validate() const; // throws ConfigError when ranges are inverted or overlap
};

/// A spectral line identified as a candidate self-excited frequency. Band,
/// axis, configuration and origin are annotations added by later stages.
struct ModalPeak {
    double frequency = 0.0;
    double amplitude = 0.0;
    BandClass band = BandClass::out_of_band;
    std::string axis;
    std::string config;
    PeakOrigin origin = PeakOrigin::structural;
};

struct TrackEntry {
    std::string config;
    double frequency = 0.0;
    double amplitude = 0.0;
};

/// One mode followed across robot configurations on a single axis.
struct ModeTrack {
    std::string axis;
    std::vector<TrackEntry> entries;
    Trend trend = Trend::flat;
    bool partial = false; // shorter than the supplied configuration list
};

struct StiffnessEntry {
    std::string config;
    double ratio = 1.0;     // (f / f_ref)^2 under constant modal mass
    double shift_pct = 0.0; // (f - f_ref) / f_ref * 100
};

struct StiffnessTrend {
    std::string axis;
    std::string reference;
    std::vector<StiffnessEntry> entries;
    Trend verdict = Trend::flat;
};

struct MainsConfig {
    double frequency = 50.0;
    int harmonics = 2;
    double tol = 0.5;
};

/// Peaks per configuration label, in caller-supplied configuration order.
using ConfigPeaks = std::pair<std::string, std::vector<ModalPeak>>;

/// Local maxima above floor_factor * (median + MAD) whose prominence over the
/// higher adjacent valley exceeds min_prominence * amplitude. Frequencies are
/// refined by parabolic interpolation over the three bins around the maximum;
/// result is sorted by descending amplitude.
std::vector<ModalPeak> detect_peaks(const Spectrum& spectrum, double floor_factor = 5.0,
                                    double min_prominence = 0.1);

/// Total classification over [0, Nyquist]; band edges are inclusive.
BandClass classify_band(double frequency, const BandConfig& bands = {});

/// Marks a peak external iff it lies within tol of a mains harmonic AND every
/// supplied configuration has a peak near that harmonic; a structural mode
/// that shifts with configuration therefore stays structural even when one
/// position happens to sit near the grid frequency.
std::vector<ConfigPeaks> reject_mains(std::vector<ConfigPeaks> peaks_by_config,
                                      const MainsConfig& mains = {});

/// Greedy nearest-frequency matching of structural peaks from one
/// configuration to the next. match_tol overrides the banded defaults
/// (5 Hz in the LFR, 2% of frequency elsewhere).
std::vector<ModeTrack> track_modes(const std::vector<ConfigPeaks>& structural_by_config,
                                   const BandConfig& bands = {},
                                   std::optional<double> match_tol = {});

/// Frequency shifts read as stiffness change at constant modal mass.
StiffnessTrend stiffness_trend(const ModeTrack& track, const std::string& reference);

} // namespace vibro
