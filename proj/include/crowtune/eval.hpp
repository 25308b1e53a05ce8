#pragma once

#include <limits>
#include <span>
#include <stdexcept>

#include "crowtune/image.hpp"

namespace crowtune {

class UndefinedCorrelationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Pearson product-moment correlation of two equally long series.
double pearson(std::span<const double> x, std::span<const double> y);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(range^2 / MSE) in dB; kInfinitePsnr for identical images.
double psnr(const Array2D& image, const Array2D& reference, double data_range);

/// Root-mean-square difference.
double rms_error(const Array2D& image, const Array2D& reference);

}  // namespace crowtune
