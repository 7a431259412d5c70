#include "vibro/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "robust_stats.hpp"
#include "vibro/error.hpp"
#include "vibro/modal.hpp"

namespace vibro {

void MachiningSetup::validate() const {
    if (!(spindle_rpm > 0.0)) throw ConfigError("spindle speed must be positive");
    if (teeth < 1) throw ConfigError("tooth count must be at least 1");
    if (tool_diameter_mm < 0.0) throw ConfigError("tool diameter must be non-negative");
    if (cutting_speed_m_min && !(*cutting_speed_m_min > 0.0)) {
        throw ConfigError("cutting speed must be positive");
    }
}

std::optional<double> MachiningSetup::computed_cutting_speed_m_min() const {
    if (!(tool_diameter_mm > 0.0)) return std::nullopt;
    return std::numbers::pi * (tool_diameter_mm / 1000.0) * spindle_rpm;
}

double RotationProfile::speed_variation() const {
    double worst = 0.0;
    for (double f : instantaneous_frequency) {
        worst = std::max(worst, std::abs(f - mean_frequency) / mean_frequency);
    }
    return worst;
}

std::vector<double> detect_pulses(std::span<const double> tacho, double sample_rate,
                                  double threshold, double hysteresis) {
    if (tacho.size() < 2) throw InputError("tachometer channel requires at least 2 samples");
    if (!(sample_rate > 0.0)) throw InputError("sample rate must be positive");
    if (!(hysteresis > 0.0 && hysteresis < threshold && threshold < 1.0)) {
        throw ConfigError("pulse detection needs 0 < hysteresis < threshold < 1");
    }

    const auto [lo_it, hi_it] = std::minmax_element(tacho.begin(), tacho.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw AnalysisError("no tachometer pulses: channel is constant");
    const double range = hi - lo;

    const double arm_level = threshold - hysteresis;
    std::vector<double> pulses;
    bool armed = (tacho[0] - lo) / range < arm_level;
    double prev = (tacho[0] - lo) / range;
    for (std::size_t i = 1; i < tacho.size(); ++i) {
        const double cur = (tacho[i] - lo) / range;
        if (armed && prev < threshold && cur >= threshold) {
            const double frac = (threshold - prev) / (cur - prev);
            pulses.push_back((static_cast<double>(i - 1) + frac) / sample_rate);
            armed = false;
        } else if (!armed && cur < arm_level) {
            armed = true;
        }
        prev = cur;
    }
    if (pulses.empty()) throw AnalysisError("no tachometer pulses detected");
    return pulses;
}

RotationProfile rotation_frequency(std::span<const double> pulse_times) {
    if (pulse_times.size() < 2) {
        throw AnalysisError("rotation frequency needs at least 2 tachometer pulses");
    }

    RotationProfile profile;
    profile.pulse_times.assign(pulse_times.begin(), pulse_times.end());
    for (std::size_t i = 1; i < pulse_times.size(); ++i) {
        const double dt = pulse_times[i] - pulse_times[i - 1];
        if (!(dt > 0.0)) throw InputError("pulse times must be strictly increasing");
        profile.instantaneous_frequency.push_back(1.0 / dt);
    }
    profile.mean_frequency = static_cast<double>(pulse_times.size() - 1) /
                             (pulse_times.back() - pulse_times.front());
    return profile;
}

double tooth_pass_frequency(const MachiningSetup& setup) {
    setup.validate();
    return setup.spindle_rpm / 60.0 * static_cast<double>(setup.teeth);
}

OrderSpectrum order_spectrum(const Spectrum& spectrum, double f_rot, int max_order,
                             std::optional<double> tol) {
    if (spectrum.amplitudes.empty()) throw InputError("order analysis requires a non-empty spectrum");
    if (!(f_rot > 0.0)) throw InputError("rotation frequency must be positive");
    if (max_order < 1) throw ConfigError("max_order must be at least 1");
    if (tol && *tol < spectrum.bin_width / 2.0) {
        throw ConfigError("order tolerance must be at least half a bin");
    }

    OrderSpectrum result;
    result.rotation_frequency = f_rot;
    result.max_order = max_order;

    const double f_max = spectrum.max_frequency();
    for (int k = 1; k <= max_order; ++k) {
        const double center = static_cast<double>(k) * f_rot;
        const double window = tol.value_or(std::max(spectrum.bin_width, 0.01 * center));
        if (center - window > f_max) continue; // above the spectrum: absent
        const double lo = std::max(0.0, center - window);
        const double hi = std::min(f_max, center + window);
        const auto first = static_cast<std::size_t>(std::ceil(lo / spectrum.bin_width - 1e-9));
        const auto last = static_cast<std::size_t>(std::floor(hi / spectrum.bin_width + 1e-9));
        double amp = 0.0;
        for (std::size_t b = first; b <= last && b < spectrum.amplitudes.size(); ++b) {
            amp = std::max(amp, spectrum.amplitudes[b]);
        }
        result.orders[k] = amp;
    }
    return result;
}

DefectFlags diagnose(const OrderSpectrum& orders, const Spectrum& spectrum,
                     std::span<const double> modal_frequencies,
                     const DiagnoseThresholds& thresholds) {
    if (!orders.orders.count(1) || !orders.orders.count(2)) {
        throw InputError("defect diagnosis requires orders 1 and 2");
    }

    DefectFlags flags;
    const double a1 = orders.orders.at(1);
    const double a2 = orders.orders.at(2);
    const double baseline = detail::median_plus_mad(spectrum.amplitudes);

    flags.imbalance_severity = baseline > 0.0 ? a1 / baseline : 0.0;
    flags.imbalance = a1 > thresholds.imbalance_factor * baseline && a1 > 0.0;
    flags.misalignment_ratio = a1 > 0.0 ? a2 / a1 : 0.0;
    flags.misalignment = flags.imbalance && flags.misalignment_ratio > thresholds.misalignment_ratio;

    const auto peaks = detect_peaks(spectrum, thresholds.peak_floor, thresholds.peak_prominence);
    for (const ModalPeak& peak : peaks) {
        for (double modal : modal_frequencies) {
            const double tol = std::max(thresholds.resonance_tol_pct / 100.0 * modal,
                                        thresholds.resonance_tol_min_hz);
            const double separation = std::abs(peak.frequency - modal);
            if (separation <= tol) {
                flags.resonance_matches.push_back({peak.frequency, modal, separation});
            }
        }
    }
    return flags;
}

} // namespace vibro
