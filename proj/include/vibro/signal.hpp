#pragma once

#include <span>

#include "vibro/types.hpp"

namespace vibro {

/// Unnormalized forward DFT of a real sequence. Any length >= 2 is handled
/// natively (no power-of-two restriction), so bin_width is always
/// sample_rate / N.
ComplexSpectrum dft_forward(std::span<const double> samples, double sample_rate);

/// Inverse DFT, scaled by 1/N. Returns the full complex sequence; use
/// dft_inverse_real when the spectrum is conjugate-symmetric.
std::vector<std::complex<double>> dft_inverse(const ComplexSpectrum& spectrum);
std::vector<double> dft_inverse_real(const ComplexSpectrum& spectrum);

/// One-sided amplitude spectrum, corrected for the window's coherent gain so
/// an in-bin sinusoid of amplitude A reads A.
Spectrum amplitude_spectrum(std::span<const double> samples, double sample_rate,
                            const Window& window = Window::hann());

/// Frequency-domain brick-wall band-pass: zero every bin with |f| outside
/// [f_lo, f_hi] (inclusive), inverse transform, take the real part.
std::vector<double> bandpass_brickwall(std::span<const double> samples, double sample_rate,
                                       double f_lo, double f_hi);

/// Analytic signal via the frequency-domain construction: keep DC and
/// Nyquist, double positive bins, zero negative bins, inverse transform.
AnalyticSignal hilbert_analytic(std::span<const double> samples, double sample_rate);

/// Block the signal (step = block_size * (1 - overlap), trailing partial
/// block discarded) and take an amplitude spectrum per block.
Waterfall waterfall(std::span<const double> samples, double sample_rate,
                    std::size_t block_size, double overlap = 0.0,
                    const Window& window = Window::hann());

} // namespace vibro
