#include "crowtune/eval.hpp"

#include <algorithm>
#include <cmath>

namespace crowtune {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: series differ in length");
    if (x.size() < 2) throw std::invalid_argument("pearson: needs at least two samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw UndefinedCorrelationError("pearson: constant series");
    return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

double rms_error(const Array2D& image, const Array2D& reference) {
    if (!image.same_shape(reference)) throw std::invalid_argument("rms_error: shape mismatch");
    return distance2(image.data(), reference.data()) / std::sqrt(static_cast<double>(image.size()));
}

double psnr(const Array2D& image, const Array2D& reference, double data_range) {
    if (!image.same_shape(reference)) throw std::invalid_argument("psnr: shape mismatch");
    if (!(data_range > 0.0)) throw std::invalid_argument("psnr: data_range must be positive");
    double sum = 0.0;
    const auto a = image.data();
    const auto b = reference.data();
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    const double mse = sum / static_cast<double>(a.size());
    if (mse == 0.0) return kInfinitePsnr;
    return 10.0 * std::log10(data_range * data_range / mse);
}

}  // namespace crowtune
