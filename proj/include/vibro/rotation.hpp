#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "vibro/types.hpp"

namespace vibro {

struct MachiningSetup {
    double spindle_rpm = 0.0;
    int teeth = 1;
    double tool_diameter_mm = 0.0;
    std::optional<double> cutting_speed_m_min;
    std::optional<double> feed_mm_min;

    void validate() const; // throws ConfigError
    /// pi * D * n with D in meters and n in rev/min; empty when the tool
    /// diameter is unknown.
    std::optional<double> computed_cutting_speed_m_min() const;
};

struct RotationProfile {
    std::vector<double> pulse_times;
    double mean_frequency = 0.0;
    std::vector<double> instantaneous_frequency; // one value per inter-pulse interval

    double rpm() const { return mean_frequency * 60.0; }
    /// Largest relative deviation of the instantaneous frequency from the mean.
    double speed_variation() const;
};

/// Harmonic-order amplitudes relative to the rotation frequency. Orders whose
/// window lies beyond the spectrum are absent from the map.
struct OrderSpectrum {
    double rotation_frequency = 0.0;
    int max_order = 0;
    std::map<int, double> orders;
};

struct ResonanceMatch {
    double peak_frequency = 0.0;
    double modal_frequency = 0.0;
    double separation = 0.0;
};

struct DefectFlags {
    bool imbalance = false;
    double imbalance_severity = 0.0; // order-1 amplitude over the broadband baseline
    bool misalignment = false;
    double misalignment_ratio = 0.0; // A2 / A1, 0 when A1 is 0
    std::vector<ResonanceMatch> resonance_matches;
};

struct DiagnoseThresholds {
    double imbalance_factor = 5.0;
    double misalignment_ratio = 0.5;
    double resonance_tol_pct = 2.0;
    double resonance_tol_min_hz = 5.0;
    double peak_floor = 5.0;
    double peak_prominence = 0.1;
};

/// Rising-edge detection with hysteresis on the range-normalized signal;
/// crossing instants are linearly interpolated. One pulse per revolution.
std::vector<double> detect_pulses(std::span<const double> tacho, double sample_rate,
                                  double threshold = 0.5, double hysteresis = 0.1);

RotationProfile rotation_frequency(std::span<const double> pulse_times);

double tooth_pass_frequency(const MachiningSetup& setup);

/// Order amplitude = max spectrum amplitude within tol of k * f_rot. When tol
/// is omitted it defaults per order to max(bin_width, 1% of k * f_rot).
OrderSpectrum order_spectrum(const Spectrum& spectrum, double f_rot, int max_order,
                             std::optional<double> tol = {});

/// Imbalance from a dominant order 1, misalignment from order 2 riding on it,
/// and coincidences of spectral peaks with known self-excited frequencies.
DefectFlags diagnose(const OrderSpectrum& orders, const Spectrum& spectrum,
                     std::span<const double> modal_frequencies,
                     const DiagnoseThresholds& thresholds = {});

} // namespace vibro
