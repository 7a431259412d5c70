#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vibro/types.hpp"

namespace vibro {

/// Band-limited analytic-signal envelope of one channel. The raw envelope is
/// non-negative; the mean-removed copy is what the envelope spectrum uses,
/// otherwise the DC term would mask the low-frequency modulation region.
struct EnvelopeAnalysis {
    double band_low = 0.0;
    double band_high = 0.0;
    double sample_rate = 0.0;
    std::vector<double> envelope;
    std::vector<double> envelope_centered;
    std::string axis;
};

enum class ModulationSource { rotation_harmonic, structural, unattributed };

const char* to_string(ModulationSource source);

struct ModulationPeak {
    double frequency = 0.0;
    double amplitude = 0.0;
    ModulationSource attribution = ModulationSource::unattributed;
    int order = 0; // rotation-harmonic index when attributed to rotation
};

struct ToothAsymmetryReport {
    std::map<int, double> order_amplitudes;      // k = 1..teeth at k * f_rot
    std::optional<double> tooth_pass_amplitude;  // absent when above the spectrum
    double tooth_pass_frequency = 0.0;
    double asymmetry_index = 0.0; // max sub-tooth amplitude / tooth-pass amplitude
    bool flagged = false;
    double threshold = 0.2;
};

/// Brick-wall band-pass around the structural resonance band followed by the
/// analytic-signal magnitude.
EnvelopeAnalysis envelope_signal(std::span<const double> samples, double sample_rate,
                                 double f_lo = 2000.0, double f_hi = 3000.0);

/// Amplitude spectrum of the mean-removed envelope over the full record.
Spectrum envelope_spectrum(const EnvelopeAnalysis& analysis, const Window& window = Window::hann());

/// Peak-picks the envelope spectrum and attributes each peak: rotation
/// harmonic within tol of k * f_rot (takes precedence), structural within tol
/// of a supplied low-frequency modal frequency, otherwise unattributed.
std::vector<ModulationPeak> detect_modulation(const Spectrum& envelope_spec, double f_rot,
                                              std::span<const double> lfr_modal_frequencies,
                                              double tol = 1.0, double peak_floor = 5.0,
                                              double min_prominence = 0.1);

/// Reads envelope-spectrum amplitudes at k * f_rot for k = 1..teeth; unequal
/// cutting per tooth shows up as harmonics below the tooth-pass frequency.
ToothAsymmetryReport tooth_asymmetry(const Spectrum& envelope_spec, double f_rot, int teeth,
                                     std::optional<double> tol = {}, double threshold = 0.2);

} // namespace vibro
