#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace vibro {

/// Multi-channel time series as acquired: acceleration axes plus an optional
/// tachometer channel, all sharing one sample rate. Channel order is the
/// acquisition order; names are unique.
struct Recording {
    std::string label;
    double sample_rate = 0.0;
    std::vector<std::pair<std::string, std::vector<double>>> channels;
    std::string digest; // fnv1a64 of the source bytes, filled by the loaders

    std::size_t length() const {
        return channels.empty() ? 0 : channels.front().second.size();
    }
    double duration() const {
        return sample_rate > 0 ? static_cast<double>(length()) / sample_rate : 0.0;
    }
    bool has_channel(const std::string& name) const;
    const std::vector<double>& channel(const std::string& name) const; // throws InputError
    void validate() const;                                             // throws InputError
};

enum class WindowKind { rectangular, hann };

/// Window descriptor; coherent gain is the mean of the window samples and is
/// what amplitude spectra divide out so in-bin sinusoids read true.
struct Window {
    WindowKind kind = WindowKind::hann;
    double coherent_gain = 0.5;

    static Window rectangular() { return {WindowKind::rectangular, 1.0}; }
    static Window hann() { return {WindowKind::hann, 0.5}; }
    static Window from_name(const std::string& name); // throws ConfigError
    const char* name() const;
};

/// Two-sided complex DFT, standard bin order (bin k at k * bin_width, the
/// upper half being the negative frequencies).
struct ComplexSpectrum {
    double bin_width = 0.0;
    std::vector<std::complex<double>> bins;
};

/// One-sided amplitude spectrum, window-gain corrected. Bin i sits at
/// i * bin_width; DC and Nyquist are not doubled.
struct Spectrum {
    double bin_width = 0.0;
    std::vector<double> amplitudes;
    Window window;

    double frequency(std::size_t bin) const { return static_cast<double>(bin) * bin_width; }
    double max_frequency() const {
        return amplitudes.empty() ? 0.0 : static_cast<double>(amplitudes.size() - 1) * bin_width;
    }
};

/// Time-indexed stack of block spectra.
struct Waterfall {
    std::vector<double> block_times;
    std::vector<Spectrum> spectra;
    std::size_t block_size = 0;
    double overlap = 0.0;
};

/// Complex signal whose real part is the input and whose magnitude is the
/// instantaneous envelope.
struct AnalyticSignal {
    double sample_rate = 0.0;
    std::vector<std::complex<double>> values;

    std::vector<double> magnitude() const;
};

} // namespace vibro
