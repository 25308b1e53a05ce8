#pragma once

#include <optional>

#include "crowtune/errors.hpp"
#include "crowtune/image.hpp"

namespace crowtune {

/// Weights and cutoff for the no-reference fitness. Lower fitness is better.
struct FitnessConfig {
    double eta = 1.0;    ///< weight on 1/SNR
    double xi = 4.0;     ///< weight on 1 - HFER
    double gamma = 0.25; ///< cutoff as a fraction of the maximum radial frequency

    /// Throws std::invalid_argument on negative weights, eta + xi == 0 or
    /// gamma outside (0, 1).
    void validate() const;
};

/// Two minimization objectives kept separate for Pareto selection.
struct ObjectiveVector {
    double inv_snr = 0.0;
    double hfer_deficit = 0.0;

    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

struct FitnessReport {
    double snr = 0.0;
    double hfer = 0.0;
    std::optional<double> laplacian_var;
    double fitness = 0.0;
    ObjectiveVector objectives;
    /// Reference-based diagnostic, filled only when a ground truth is known.
    std::optional<double> psnr;
};

/// Mean over slices of mean/stddev (population stddev).
double snr(const Volume& volume);
double snr(const Image2D& slice);

/// |DFT|^2 with the zero frequency moved to row floor(rows/2), column
/// floor(cols/2).
Array2D power_spectrum(const Image2D& slice);

/// Distance of centered bin (r, c) from the spectrum center.
double radial_frequency(std::size_t r, std::size_t c, std::size_t rows, std::size_t cols) noexcept;
double max_radial_frequency(std::size_t rows, std::size_t cols) noexcept;

/// Fraction of spectral energy strictly beyond gamma * Qmax, averaged over slices.
double hfer(const Volume& volume, double gamma);
double hfer(const Image2D& slice, double gamma);

/// Variance of the interior 4-neighbour Laplacian responses pooled over slices.
double laplacian_variance(const Volume& volume);

FitnessReport evaluate(const Volume& volume, const FitnessConfig& config);
FitnessReport evaluate(const Image2D& slice, const FitnessConfig& config);

/// Scalar fitness from its two terms.
double combine(const FitnessConfig& config, double snr_value, double hfer_value) noexcept;

}  // namespace crowtune
