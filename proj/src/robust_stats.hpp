#pragma once

// Internal helpers: robust location/scale used as the spectral noise floor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace vibro::detail {

inline double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        const auto lower =
            std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + *lower);
    }
    return m;
}

// median + median-absolute-deviation: tolerant of a few large spectral lines.
inline double median_plus_mad(const std::vector<double>& values) {
    const double med = median_of(values);
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - med);
    return med + median_of(std::move(dev));
}

} // namespace vibro::detail
