#pragma once

#include <cstdint>
#include <vector>

namespace vibro::synth {

struct Mode {
    double frequency = 0.0; // natural frequency, Hz
    double zeta = 0.0;      // damping ratio in [0, 1)
    double amplitude = 1.0;
};

struct ModalModel {
    std::vector<Mode> modes;
};

struct RotorHarmonic {
    int order = 1;
    double amplitude = 0.0;
    double phase = 0.0;
};

struct RotorModel {
    double rotation_frequency = 0.0;
    std::vector<RotorHarmonic> orders;
};

/// Tooth-impact train through a single structural resonance, optionally
/// amplitude-modulated. tooth_gains empty means all teeth equal.
struct MillingModel {
    double rotation_frequency = 0.0;
    int teeth = 1;
    std::vector<double> tooth_gains;
    double resonance_frequency = 0.0;
    double resonance_zeta = 0.05;
    double modulation_frequency = 0.0;
    double modulation_depth = 0.0;
};

/// Sum of decaying sinusoids started at t = 0:
/// x(t) = sum_i A_i exp(-2*pi*zeta_i*f_i*t) sin(2*pi*f_i*sqrt(1-zeta_i^2)*t).
std::vector<double> modal_impulse(const ModalModel& model, double sample_rate, double duration);

/// x(t) = sum_k a_k sin(2*pi*k*f_rot*t + phi_k).
std::vector<double> rotor_signal(const RotorModel& model, double sample_rate, double duration);

/// Steady-state periodic response of the resonance to the tooth-impact train,
/// synthesized in the frequency domain (band-limited, ringdown tails wrapped
/// around the record) so the generated line content is exact: with equal
/// tooth gains the spectrum holds multiples of teeth * f_rot only, and gain
/// asymmetry adds lines at the remaining multiples of f_rot.
std::vector<double> milling_signal(const MillingModel& model, double sample_rate, double duration);

/// Rectangular once-per-revolution pulse train, high for duty * period,
/// centered mid-period so the record never starts inside a pulse.
std::vector<double> tacho_pulses(double rotation_frequency, double sample_rate, double duration,
                                 double duty = 0.2);

/// Element-wise sum plus seeded Gaussian noise (deterministic per seed).
std::vector<double> mix_and_noise(const std::vector<std::vector<double>>& components,
                                  double noise_sd, std::uint64_t seed);

} // namespace vibro::synth
