#include "vibro/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "vibro/error.hpp"
#include "vibro/signal.hpp"
#include "vibro/types.hpp"

namespace vibro::synth {

namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t sample_count(double sample_rate, double duration) {
    if (!(sample_rate > 0.0)) throw InputError("sample rate must be positive");
    if (!(duration > 0.0)) throw InputError("duration must be positive");
    const auto n = static_cast<std::size_t>(std::llround(sample_rate * duration));
    if (n < 2) throw InputError("duration * sample_rate must be at least 2 samples");
    return n;
}

// One-sided Fourier transform of exp(-alpha*t) * sin(omega_d*t), t >= 0.
cd resonance_response(double f, double alpha, double omega_d) {
    const cd s(alpha, kTwoPi * f);
    return omega_d / (s * s + omega_d * omega_d);
}

// sum_{q=0}^{count-1} exp(-i*phi*q); stable near phi = 2*pi*m, where the sum
// degenerates to count.
cd phasor_train_sum(double phi, std::size_t count) {
    const double delta = std::remainder(phi, kTwoPi);
    if (std::abs(delta) < 1e-10) return cd(static_cast<double>(count), 0.0);
    const cd num = 1.0 - std::polar(1.0, -delta * static_cast<double>(count));
    const cd den = 1.0 - std::polar(1.0, -delta);
    return num / den;
}

// Box-Muller over mt19937_64: the standard pins the engine, so one seed gives
// one stream on every platform.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;         // [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        spare_ = radius * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return radius * std::cos(kTwoPi * u2);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace

std::vector<double> modal_impulse(const ModalModel& model, double sample_rate, double duration) {
    const std::size_t n = sample_count(sample_rate, duration);
    for (const Mode& mode : model.modes) {
        if (!(mode.frequency > 0.0 && mode.frequency < sample_rate / 2.0)) {
            throw ConfigError("modal frequency must lie below Nyquist");
        }
        if (!(mode.zeta >= 0.0 && mode.zeta < 1.0)) {
            throw ConfigError("damping ratio must lie in [0, 1)");
        }
    }

    std::vector<double> x(n, 0.0);
    for (const Mode& mode : model.modes) {
        const double alpha = kTwoPi * mode.zeta * mode.frequency;
        const double omega_d = kTwoPi * mode.frequency * std::sqrt(1.0 - mode.zeta * mode.zeta);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / sample_rate;
            x[i] += mode.amplitude * std::exp(-alpha * t) * std::sin(omega_d * t);
        }
    }
    return x;
}

std::vector<double> rotor_signal(const RotorModel& model, double sample_rate, double duration) {
    const std::size_t n = sample_count(sample_rate, duration);
    if (!model.orders.empty() && !(model.rotation_frequency > 0.0)) {
        throw ConfigError("rotor rotation frequency must be positive");
    }
    for (const RotorHarmonic& h : model.orders) {
        if (h.order < 1) throw ConfigError("rotor order must be at least 1");
        if (!(h.order * model.rotation_frequency < sample_rate / 2.0)) {
            throw ConfigError("rotor order lies above Nyquist");
        }
    }

    std::vector<double> x(n, 0.0);
    for (const RotorHarmonic& h : model.orders) {
        const double omega = kTwoPi * static_cast<double>(h.order) * model.rotation_frequency;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h.amplitude * std::sin(omega * static_cast<double>(i) / sample_rate + h.phase);
        }
    }
    return x;
}

std::vector<double> milling_signal(const MillingModel& model, double sample_rate, double duration) {
    const std::size_t n = sample_count(sample_rate, duration);
    if (model.teeth < 1) throw ConfigError("milling model needs at least 1 tooth");
    if (!(model.rotation_frequency > 0.0)) throw ConfigError("rotation frequency must be positive");
    if (!(model.resonance_frequency > 0.0 && model.resonance_frequency < sample_rate / 2.0)) {
        throw ConfigError("resonance frequency must lie below Nyquist");
    }
    if (!(model.resonance_zeta > 0.0 && model.resonance_zeta < 1.0)) {
        throw ConfigError("resonance damping ratio must lie in (0, 1)");
    }
    if (!(model.modulation_depth >= 0.0 && model.modulation_depth < 1.0)) {
        throw ConfigError("modulation depth must lie in [0, 1)");
    }
    if (model.modulation_depth > 0.0 &&
        !(model.modulation_frequency > 0.0 && model.modulation_frequency < sample_rate / 2.0)) {
        throw ConfigError("modulation frequency must lie below Nyquist");
    }
    std::vector<double> gains = model.tooth_gains;
    if (gains.empty()) gains.assign(static_cast<std::size_t>(model.teeth), 1.0);
    if (gains.size() != static_cast<std::size_t>(model.teeth)) {
        throw ConfigError("tooth gain count must equal the tooth count");
    }
    for (double g : gains) {
        if (!(g >= 0.0)) throw ConfigError("tooth gains must be non-negative");
    }

    const double teeth = static_cast<double>(model.teeth);
    const double tooth_period = 1.0 / (teeth * model.rotation_frequency);
    const auto events =
        static_cast<std::size_t>(std::floor(teeth * model.rotation_frequency * duration + 1e-9));
    if (events == 0) throw ConfigError("record too short to contain a tooth impact");

    const double alpha = kTwoPi * model.resonance_zeta * model.resonance_frequency;
    const double omega_d = kTwoPi * model.resonance_frequency *
                           std::sqrt(1.0 - model.resonance_zeta * model.resonance_zeta);
    const double period = static_cast<double>(n) / sample_rate;

    // Fourier coefficients of the periodized impact train: per bin, the
    // resonance response times the event sum, the latter collapsed into one
    // geometric series per tooth.
    ComplexSpectrum spectrum;
    spectrum.bin_width = sample_rate / static_cast<double>(n);
    spectrum.bins.assign(n, cd(0.0, 0.0));
    const std::size_t positive_end = n % 2 == 0 ? n / 2 : (n + 1) / 2; // Nyquist left zero
    for (std::size_t k = 0; k < positive_end; ++k) {
        const double f = static_cast<double>(k) * spectrum.bin_width;
        const double phi = kTwoPi * f / model.rotation_frequency; // revolution-to-revolution phase
        cd event_sum(0.0, 0.0);
        for (int r = 0; r < model.teeth; ++r) {
            const auto q = static_cast<std::size_t>(r);
            const std::size_t count = (events - q + static_cast<std::size_t>(model.teeth) - 1) /
                                      static_cast<std::size_t>(model.teeth);
            if (count == 0) continue;
            const double theta = kTwoPi * f * static_cast<double>(r) * tooth_period;
            event_sum += gains[q] * std::polar(1.0, -theta) * phasor_train_sum(phi, count);
        }
        const cd coefficient = resonance_response(f, alpha, omega_d) * event_sum / period;
        spectrum.bins[k] = coefficient * static_cast<double>(n);
        if (k > 0) spectrum.bins[n - k] = std::conj(spectrum.bins[k]);
    }
    spectrum.bins[0] = cd(spectrum.bins[0].real(), 0.0);

    std::vector<double> x = dft_inverse_real(spectrum);
    if (model.modulation_depth > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / sample_rate;
            x[i] *= 1.0 + model.modulation_depth * std::cos(kTwoPi * model.modulation_frequency * t);
        }
    }
    return x;
}

std::vector<double> tacho_pulses(double rotation_frequency, double sample_rate, double duration,
                                 double duty) {
    const std::size_t n = sample_count(sample_rate, duration);
    if (!(rotation_frequency > 0.0 && rotation_frequency < sample_rate / 4.0)) {
        throw ConfigError("tachometer rotation frequency must lie below sample_rate / 4");
    }
    if (!(duty > 0.0 && duty < 1.0)) throw ConfigError("tachometer duty must lie in (0, 1)");

    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double revolutions = rotation_frequency * static_cast<double>(i) / sample_rate;
        const double phase = revolutions - std::floor(revolutions);
        if (std::abs(phase - 0.5) < duty / 2.0) x[i] = 1.0;
    }
    return x;
}

std::vector<double> mix_and_noise(const std::vector<std::vector<double>>& components,
                                  double noise_sd, std::uint64_t seed) {
    if (components.empty()) throw InputError("mix requires at least one component");
    const std::size_t n = components.front().size();
    for (const auto& c : components) {
        if (c.size() != n) throw InputError("mix components must share one length");
    }
    if (noise_sd < 0.0) throw ConfigError("noise standard deviation must be non-negative");

    std::vector<double> x(n, 0.0);
    for (const auto& c : components) {
        for (std::size_t i = 0; i < n; ++i) x[i] += c[i];
    }
    if (noise_sd > 0.0) {
        GaussianStream noise(seed);
        for (double& v : x) v += noise_sd * noise.next();
    }
    return x;
}

} // namespace vibro::synth
