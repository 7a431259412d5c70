#include "vibro/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vibro/error.hpp"
#include "vibro/modal.hpp"
#include "vibro/rotation.hpp"
#include "vibro/signal.hpp"

namespace vibro {

const char* to_string(ModulationSource source) {
    switch (source) {
        case ModulationSource::rotation_harmonic: return "rotation_harmonic";
        case ModulationSource::structural: return "structural";
        case ModulationSource::unattributed: return "unattributed";
    }
    return "unknown";
}

EnvelopeAnalysis envelope_signal(std::span<const double> samples, double sample_rate,
                                 double f_lo, double f_hi) {
    if (!(f_lo > 0.0 && f_hi < sample_rate / 2.0)) {
        throw ConfigError("envelope band must lie strictly inside (0, Nyquist)");
    }

    EnvelopeAnalysis analysis;
    analysis.band_low = f_lo;
    analysis.band_high = f_hi;
    analysis.sample_rate = sample_rate;

    const std::vector<double> banded = bandpass_brickwall(samples, sample_rate, f_lo, f_hi);
    analysis.envelope = hilbert_analytic(banded, sample_rate).magnitude();

    const double mean = std::accumulate(analysis.envelope.begin(), analysis.envelope.end(), 0.0) /
                        static_cast<double>(analysis.envelope.size());
    analysis.envelope_centered.resize(analysis.envelope.size());
    for (std::size_t i = 0; i < analysis.envelope.size(); ++i) {
        analysis.envelope_centered[i] = analysis.envelope[i] - mean;
    }
    return analysis;
}

Spectrum envelope_spectrum(const EnvelopeAnalysis& analysis, const Window& window) {
    if (analysis.envelope_centered.size() < 2) throw InputError("envelope has not been computed");
    return amplitude_spectrum(analysis.envelope_centered, analysis.sample_rate, window);
}

std::vector<ModulationPeak> detect_modulation(const Spectrum& envelope_spec, double f_rot,
                                              std::span<const double> lfr_modal_frequencies,
                                              double tol, double peak_floor,
                                              double min_prominence) {
    if (envelope_spec.amplitudes.empty()) throw InputError("envelope spectrum is empty");
    if (!(tol > 0.0)) throw ConfigError("modulation tolerance must be positive");

    std::vector<ModulationPeak> result;
    for (const ModalPeak& p : detect_peaks(envelope_spec, peak_floor, min_prominence)) {
        ModulationPeak mod;
        mod.frequency = p.frequency;
        mod.amplitude = p.amplitude;

        if (f_rot > 0.0) {
            const int k = static_cast<int>(std::lround(p.frequency / f_rot));
            if (k >= 1 && std::abs(p.frequency - k * f_rot) <= tol) {
                mod.attribution = ModulationSource::rotation_harmonic;
                mod.order = k;
            }
        }
        if (mod.attribution == ModulationSource::unattributed) {
            const bool structural = std::any_of(
                lfr_modal_frequencies.begin(), lfr_modal_frequencies.end(),
                [&](double f) { return std::abs(p.frequency - f) <= tol; });
            if (structural) mod.attribution = ModulationSource::structural;
        }
        result.push_back(mod);
    }
    return result;
}

ToothAsymmetryReport tooth_asymmetry(const Spectrum& envelope_spec, double f_rot, int teeth,
                                     std::optional<double> tol, double threshold) {
    if (teeth < 2) throw ConfigError("tooth asymmetry needs at least 2 teeth");
    if (!(f_rot > 0.0)) throw InputError("rotation frequency must be positive");

    ToothAsymmetryReport report;
    report.threshold = threshold;
    report.tooth_pass_frequency = static_cast<double>(teeth) * f_rot;

    const OrderSpectrum orders = order_spectrum(envelope_spec, f_rot, teeth, tol);
    double sub_tooth_max = 0.0;
    for (const auto& [k, amplitude] : orders.orders) {
        report.order_amplitudes[k] = amplitude;
        if (k < teeth) sub_tooth_max = std::max(sub_tooth_max, amplitude);
    }

    if (auto it = report.order_amplitudes.find(teeth); it != report.order_amplitudes.end()) {
        report.tooth_pass_amplitude = it->second;
    }

    const double tooth_pass = report.tooth_pass_amplitude.value_or(0.0);
    report.asymmetry_index = tooth_pass > 0.0 ? sub_tooth_max / tooth_pass : 0.0;
    report.flagged = report.asymmetry_index > threshold;
    return report;
}

} // namespace vibro
