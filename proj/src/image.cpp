#include "crowtune/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowtune {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

double distance2(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

bool all_finite(std::span<const double> a) noexcept {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

double min_value(std::span<const double> a) noexcept {
    if (a.empty()) return std::numeric_limits<double>::quiet_NaN();
    return *std::min_element(a.begin(), a.end());
}

double max_value(std::span<const double> a) noexcept {
    if (a.empty()) return std::numeric_limits<double>::quiet_NaN();
    return *std::max_element(a.begin(), a.end());
}

}  // namespace crowtune
