#include "vibro/modal.hpp"

#include <algorithm>
#include <cmath>

#include "robust_stats.hpp"
#include "vibro/error.hpp"

namespace vibro {

namespace {

// Walk outward from a local maximum while the amplitudes fall; the turning
// point is the adjacent valley.
double left_valley(const std::vector<double>& a, std::size_t peak) {
    std::size_t i = peak;
    while (i > 0 && a[i - 1] <= a[i]) --i;
    return a[i];
}

double right_valley(const std::vector<double>& a, std::size_t peak) {
    std::size_t i = peak;
    while (i + 1 < a.size() && a[i + 1] <= a[i]) ++i;
    return a[i];
}

double default_match_tol(double frequency, BandClass band) {
    return band == BandClass::lfr ? 5.0 : 0.02 * frequency;
}

Trend trend_of_entries(const std::vector<TrackEntry>& entries) {
    if (entries.size() < 2) return Trend::flat;
    const double dead_band = 0.01 * entries.front().frequency;
    bool all_up = true, all_down = true;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const double step = entries[i].frequency - entries[i - 1].frequency;
        all_up = all_up && step > dead_band;
        all_down = all_down && step < -dead_band;
    }
    if (all_up) return Trend::increasing;
    if (all_down) return Trend::decreasing;
    return Trend::flat;
}

} // namespace

const char* to_string(BandClass band) {
    switch (band) {
        case BandClass::lfr: return "LFR";
        case BandClass::hfr: return "HFR";
        case BandClass::out_of_band: return "out_of_band";
    }
    return "unknown";
}

const char* to_string(PeakOrigin origin) {
    return origin == PeakOrigin::structural ? "structural" : "external";
}

const char* to_string(Trend trend) {
    switch (trend) {
        case Trend::increasing: return "increasing";
        case Trend::decreasing: return "decreasing";
        case Trend::flat: return "flat";
    }
    return "unknown";
}

const char* verdict_string(Trend verdict) {
    switch (verdict) {
        case Trend::increasing: return "increase";
        case Trend::decreasing: return "decrease";
        case Trend::flat: return "flat";
    }
    return "unknown";
}

void BandConfig::validate() const {
    if (!(lfr.low >= 0.0 && lfr.low < lfr.high)) throw ConfigError("LFR band is inverted");
    if (!(hfr.low < hfr.high)) throw ConfigError("HFR band is inverted");
    if (!(lfr.high < hfr.low)) throw ConfigError("LFR and HFR bands must not overlap");
}

std::vector<ModalPeak> detect_peaks(const Spectrum& spectrum, double floor_factor,
                                    double min_prominence) {
    if (spectrum.amplitudes.empty()) throw InputError("peak detection requires a non-empty spectrum");
    if (floor_factor < 1.0) throw ConfigError("floor_factor must be at least 1");

    const std::vector<double>& a = spectrum.amplitudes;
    const double floor = floor_factor * detail::median_plus_mad(a);
    // The robust floor of a noise-free spectrum is exactly zero, which would
    // let double-precision DFT residue (~1e-15 of the largest line) pass as
    // peaks; anything that far below the maximum is rounding, not signal.
    const double rounding_floor =
        1e-12 * *std::max_element(a.begin(), a.end());

    std::vector<ModalPeak> peaks;
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        if (!(a[i] > a[i - 1] && a[i] > a[i + 1])) continue;
        if (!(a[i] > floor && a[i] > rounding_floor)) continue;
        const double valley = std::max(left_valley(a, i), right_valley(a, i));
        if (!(a[i] - valley > min_prominence * a[i])) continue;

        // Parabolic refinement over the three bins around the maximum.
        const double alpha = a[i - 1], beta = a[i], gamma = a[i + 1];
        const double denom = alpha - 2.0 * beta + gamma;
        const double offset = denom == 0.0 ? 0.0 : 0.5 * (alpha - gamma) / denom;

        ModalPeak peak;
        peak.frequency = (static_cast<double>(i) + offset) * spectrum.bin_width;
        peak.amplitude = beta;
        peaks.push_back(peak);
    }

    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const ModalPeak& x, const ModalPeak& y) { return x.amplitude > y.amplitude; });
    return peaks;
}

BandClass classify_band(double frequency, const BandConfig& bands) {
    bands.validate();
    if (frequency < 0.0) throw InputError("frequency must be non-negative");
    if (frequency >= bands.lfr.low && frequency <= bands.lfr.high) return BandClass::lfr;
    if (frequency >= bands.hfr.low && frequency <= bands.hfr.high) return BandClass::hfr;
    return BandClass::out_of_band;
}

std::vector<ConfigPeaks> reject_mains(std::vector<ConfigPeaks> peaks_by_config,
                                      const MainsConfig& mains) {
    if (mains.tol <= 0.0) throw ConfigError("mains tolerance must be positive");
    if (peaks_by_config.empty()) throw InputError("mains rejection requires at least one configuration");

    const auto near_harmonic = [&](const std::vector<ModalPeak>& peaks, double target) {
        return std::any_of(peaks.begin(), peaks.end(), [&](const ModalPeak& p) {
            return std::abs(p.frequency - target) < mains.tol;
        });
    };

    // A harmonic counts as a grid line only when every configuration shows it.
    std::vector<double> invariant_harmonics;
    for (int k = 1; k <= mains.harmonics; ++k) {
        const double target = static_cast<double>(k) * mains.frequency;
        const bool everywhere = std::all_of(
            peaks_by_config.begin(), peaks_by_config.end(),
            [&](const ConfigPeaks& cp) { return near_harmonic(cp.second, target); });
        if (everywhere) invariant_harmonics.push_back(target);
    }

    for (ConfigPeaks& cp : peaks_by_config) {
        for (ModalPeak& peak : cp.second) {
            const bool external = std::any_of(
                invariant_harmonics.begin(), invariant_harmonics.end(),
                [&](double target) { return std::abs(peak.frequency - target) < mains.tol; });
            peak.origin = external ? PeakOrigin::external : PeakOrigin::structural;
            peak.config = cp.first;
        }
    }
    return peaks_by_config;
}

std::vector<ModeTrack> track_modes(const std::vector<ConfigPeaks>& structural_by_config,
                                   const BandConfig& bands, std::optional<double> match_tol) {
    if (structural_by_config.size() < 2) {
        throw InputError("mode tracking requires at least two configurations");
    }
    bands.validate();

    struct OpenTrack {
        std::vector<TrackEntry> entries;
        bool open = true;
    };
    std::vector<OpenTrack> tracks;

    for (const ModalPeak& p : structural_by_config.front().second) {
        tracks.push_back({{{structural_by_config.front().first, p.frequency, p.amplitude}}, true});
    }

    for (std::size_t step = 1; step < structural_by_config.size(); ++step) {
        const auto& [config, peaks] = structural_by_config[step];

        // Candidate (track, peak) pairs ranked by frequency distance; each
        // track and each peak may be claimed once.
        struct Candidate {
            std::size_t track, peak;
            double distance;
        };
        std::vector<Candidate> candidates;
        for (std::size_t t = 0; t < tracks.size(); ++t) {
            if (!tracks[t].open) continue;
            const double last = tracks[t].entries.back().frequency;
            const double tol = match_tol.value_or(default_match_tol(last, classify_band(last, bands)));
            for (std::size_t p = 0; p < peaks.size(); ++p) {
                const double d = std::abs(peaks[p].frequency - last);
                if (d <= tol) candidates.push_back({t, p, d});
            }
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });

        std::vector<bool> track_taken(tracks.size(), false);
        std::vector<bool> peak_taken(peaks.size(), false);
        for (const Candidate& c : candidates) {
            if (track_taken[c.track] || peak_taken[c.peak]) continue;
            track_taken[c.track] = true;
            peak_taken[c.peak] = true;
            tracks[c.track].entries.push_back({config, peaks[c.peak].frequency, peaks[c.peak].amplitude});
        }
        for (std::size_t t = 0; t < tracks.size(); ++t) {
            if (tracks[t].open && !track_taken[t]) tracks[t].open = false;
        }
        for (std::size_t p = 0; p < peaks.size(); ++p) {
            if (!peak_taken[p]) tracks.push_back({{{config, peaks[p].frequency, peaks[p].amplitude}}, true});
        }
    }

    std::vector<ModeTrack> result;
    for (OpenTrack& t : tracks) {
        if (t.entries.size() < 2) continue; // unmatched strays cannot form a track
        ModeTrack track;
        track.entries = std::move(t.entries);
        track.partial = track.entries.size() < structural_by_config.size();
        track.trend = trend_of_entries(track.entries);
        result.push_back(std::move(track));
    }
    std::stable_sort(result.begin(), result.end(), [](const ModeTrack& a, const ModeTrack& b) {
        return a.entries.front().frequency < b.entries.front().frequency;
    });
    return result;
}

StiffnessTrend stiffness_trend(const ModeTrack& track, const std::string& reference) {
    if (track.entries.size() < 2) throw InputError("a mode track needs at least two entries");
    const auto ref = std::find_if(track.entries.begin(), track.entries.end(),
                                  [&](const TrackEntry& e) { return e.config == reference; });
    if (ref == track.entries.end()) {
        throw InputError("reference configuration '" + reference + "' is not part of the track");
    }
    const double f_ref = ref->frequency;
    if (!(f_ref > 0.0)) throw InputError("reference frequency must be positive");

    StiffnessTrend result;
    result.axis = track.axis;
    result.reference = reference;

    // Verdict considers the configurations after the reference; the dead band
    // (~1% in frequency, so ~2% in ratio) keeps numerically equal frequencies
    // from flipping it.
    constexpr double kRatioDeadBand = 0.02;
    const auto ref_index = static_cast<std::size_t>(ref - track.entries.begin());
    bool all_up = true, all_down = true;
    bool any_after = false;
    for (std::size_t i = 0; i < track.entries.size(); ++i) {
        const TrackEntry& e = track.entries[i];
        StiffnessEntry entry;
        entry.config = e.config;
        const double r = e.frequency / f_ref;
        entry.ratio = r * r;
        entry.shift_pct = (e.frequency - f_ref) / f_ref * 100.0;
        result.entries.push_back(entry);
        if (i <= ref_index) continue;
        any_after = true;
        all_up = all_up && entry.ratio > 1.0 + kRatioDeadBand;
        all_down = all_down && entry.ratio < 1.0 - kRatioDeadBand;
    }
    if (!any_after) {
        result.verdict = Trend::flat;
    } else {
        result.verdict = all_up ? Trend::increasing : all_down ? Trend::decreasing : Trend::flat;
    }
    return result;
}

} // namespace vibro
