#include "vibro/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vibro/error.hpp"

namespace vibro {

namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 transform, no scaling. sign = -1 forward,
// +1 inverse. Twiddles come from a table built with std::polar once per
// call, which keeps the roundtrip error well under the 1e-9 contract.
void fft_radix2(std::vector<cd>& a, int sign) {
    const std::size_t n = a.size();
    if (n < 2) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    std::vector<cd> twiddle(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        twiddle[j] = std::polar(1.0, sign * kTwoPi * static_cast<double>(j) / static_cast<double>(n));
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * twiddle[k * stride];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

// Bluestein chirp-z transform: exact DFT for arbitrary N via three
// power-of-two FFTs. The chirp phase uses j^2 mod 2N to stay accurate for
// large indices.
void dft_any(std::vector<cd>& data, int sign) {
    const std::size_t n = data.size();
    if (n < 2) return;
    if (is_pow2(n)) {
        fft_radix2(data, sign);
        return;
    }

    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    std::vector<cd> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto j2 = static_cast<unsigned long long>(j) * j % (2ull * n);
        chirp[j] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(j2) / static_cast<double>(n));
    }

    std::vector<cd> a(m), b(m);
    for (std::size_t j = 0; j < n; ++j) a[j] = data[j] * chirp[j];
    b[0] = cd(1.0, 0.0);
    for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(chirp[j]);

    fft_radix2(a, -1);
    fft_radix2(b, -1);
    for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
    fft_radix2(a, +1);

    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) data[k] = a[k] * chirp[k] * scale;
}

std::vector<double> make_window(WindowKind kind, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (kind == WindowKind::hann) {
        // Periodic form: coherent gain is exactly 0.5 and in-bin tones
        // leak into the two adjacent bins only.
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
        }
    }
    return w;
}

void require_samples(std::size_t n) {
    if (n < 2) throw InputError("signal requires at least 2 samples");
}

void require_sample_rate(double fs) {
    if (!(fs > 0.0)) throw InputError("sample rate must be positive");
}

std::size_t one_sided_size(std::size_t n) { return n % 2 == 0 ? n / 2 + 1 : (n + 1) / 2; }

} // namespace

const char* Window::name() const {
    switch (kind) {
        case WindowKind::rectangular: return "rectangular";
        case WindowKind::hann: return "hann";
    }
    return "unknown";
}

Window Window::from_name(const std::string& name) {
    if (name == "rectangular") return rectangular();
    if (name == "hann") return hann();
    throw ConfigError("unknown window kind: " + name);
}

std::vector<double> AnalyticSignal::magnitude() const {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [](const std::complex<double>& v) { return std::abs(v); });
    return out;
}

ComplexSpectrum dft_forward(std::span<const double> samples, double sample_rate) {
    require_samples(samples.size());
    require_sample_rate(sample_rate);

    ComplexSpectrum spectrum;
    spectrum.bin_width = sample_rate / static_cast<double>(samples.size());
    spectrum.bins.assign(samples.begin(), samples.end());
    dft_any(spectrum.bins, -1);
    return spectrum;
}

std::vector<std::complex<double>> dft_inverse(const ComplexSpectrum& spectrum) {
    if (spectrum.bins.size() < 2) throw InputError("spectrum requires at least 2 bins");

    std::vector<cd> out = spectrum.bins;
    dft_any(out, +1);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (cd& v : out) v *= scale;
    return out;
}

std::vector<double> dft_inverse_real(const ComplexSpectrum& spectrum) {
    const std::vector<cd> full = dft_inverse(spectrum);
    std::vector<double> out(full.size());
    std::transform(full.begin(), full.end(), out.begin(), [](const cd& v) { return v.real(); });
    return out;
}

Spectrum amplitude_spectrum(std::span<const double> samples, double sample_rate,
                            const Window& window) {
    require_samples(samples.size());
    require_sample_rate(sample_rate);

    const std::size_t n = samples.size();
    const std::vector<double> w = make_window(window.kind, n);
    std::vector<double> tapered(n);
    for (std::size_t i = 0; i < n; ++i) tapered[i] = samples[i] * w[i];

    const ComplexSpectrum full = dft_forward(tapered, sample_rate);

    Spectrum spectrum;
    spectrum.bin_width = full.bin_width;
    spectrum.window = window;
    const std::size_t bins = one_sided_size(n);
    spectrum.amplitudes.resize(bins);
    const double norm = 1.0 / (static_cast<double>(n) * window.coherent_gain);
    for (std::size_t k = 0; k < bins; ++k) {
        const bool shared = k == 0 || (n % 2 == 0 && k == n / 2); // DC / Nyquist
        spectrum.amplitudes[k] = std::abs(full.bins[k]) * norm * (shared ? 1.0 : 2.0);
    }
    return spectrum;
}

std::vector<double> bandpass_brickwall(std::span<const double> samples, double sample_rate,
                                       double f_lo, double f_hi) {
    require_samples(samples.size());
    require_sample_rate(sample_rate);
    if (!(f_lo >= 0.0 && f_lo < f_hi && f_hi <= sample_rate / 2.0)) {
        throw ConfigError("band-pass band must satisfy 0 <= f_lo < f_hi <= Nyquist");
    }

    ComplexSpectrum spectrum = dft_forward(samples, sample_rate);
    const std::size_t n = spectrum.bins.size();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t folded = std::min(k, n - k);
        const double f = static_cast<double>(folded) * spectrum.bin_width;
        if (f < f_lo || f > f_hi) spectrum.bins[k] = cd(0.0, 0.0);
    }
    return dft_inverse_real(spectrum);
}

AnalyticSignal hilbert_analytic(std::span<const double> samples, double sample_rate) {
    require_samples(samples.size());
    require_sample_rate(sample_rate);

    ComplexSpectrum spectrum = dft_forward(samples, sample_rate);
    const std::size_t n = spectrum.bins.size();
    const std::size_t positive_end = n % 2 == 0 ? n / 2 : (n + 1) / 2; // exclusive
    for (std::size_t k = 1; k < n; ++k) {
        if (k < positive_end) {
            spectrum.bins[k] *= 2.0;
        } else if (!(n % 2 == 0 && k == n / 2)) { // Nyquist stays as-is
            spectrum.bins[k] = cd(0.0, 0.0);
        }
    }

    AnalyticSignal analytic;
    analytic.sample_rate = sample_rate;
    analytic.values = dft_inverse(spectrum);
    return analytic;
}

Waterfall waterfall(std::span<const double> samples, double sample_rate,
                    std::size_t block_size, double overlap, const Window& window) {
    require_sample_rate(sample_rate);
    if (block_size < 2) throw InputError("waterfall block size must be at least 2 samples");
    if (block_size > samples.size()) {
        throw InputError("waterfall block size exceeds the recording length");
    }
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw ConfigError("waterfall overlap must lie in [0, 1)");
    }

    const auto step = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(block_size) * (1.0 - overlap))));

    Waterfall result;
    result.block_size = block_size;
    result.overlap = overlap;
    for (std::size_t start = 0; start + block_size <= samples.size(); start += step) {
        result.block_times.push_back(static_cast<double>(start) / sample_rate);
        result.spectra.push_back(
            amplitude_spectrum(samples.subspan(start, block_size), sample_rate, window));
    }
    return result;
}

} // namespace vibro
