#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "crowtune/errors.hpp"
#include "crowtune/image.hpp"
#include "crowtune/param_space.hpp"

namespace crowtune {

/// 2D parallel-beam geometry on an n x n grid of unit pixels centred on the
/// rotation axis, with unit-spaced detector bins.
struct Geometry {
    std::size_t n = 0;
    std::size_t n_detectors = 0;
    std::vector<double> angles;  // radians

    std::size_t n_angles() const noexcept { return angles.size(); }

    /// n_angles angles equally spaced over [0, pi).
    static Geometry parallel(std::size_t n, std::size_t n_angles, std::size_t n_detectors = 0);

    void validate() const;
    bool matches(const Image2D& image) const noexcept;
    bool matches(const Sinogram& sinogram) const noexcept;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Ray-marching projector: each ray samples the bilinearly interpolated
/// image every half pixel. The weights are stored once as a sparse matrix so
/// the back projection is its exact transpose. Immutable; safe to share.
class Projector {
public:
    explicit Projector(Geometry geometry);

    const Geometry& geometry() const noexcept { return geometry_; }

    Sinogram forward(const Image2D& image) const;
    Image2D back(const Sinogram& sinogram) const;

    /// Rows for angle a, written into `out` (size n_detectors).
    void forward_angle(const Image2D& image, std::size_t a, std::span<double> out) const;
    /// Accumulates the transpose of angle a's rows applied to `values`.
    void back_angle(std::span<const double> values, std::size_t a, Image2D& out) const;

    double row_sum(std::size_t a, std::size_t det) const noexcept { return row_sums_[a * geometry_.n_detectors + det]; }
    std::span<const double> column_sums(std::size_t a) const noexcept {
        return {column_sums_.data() + a * pixels(), pixels()};
    }

    std::size_t nonzeros() const noexcept { return values_.size(); }

private:
    std::size_t pixels() const noexcept { return geometry_.n * geometry_.n; }

    Geometry geometry_;
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> columns_;
    std::vector<double> values_;
    std::vector<double> row_sums_;
    std::vector<double> column_sums_;  // per angle, per pixel
};

Sinogram forward_project(const Image2D& image, const Geometry& geometry);
Image2D back_project(const Sinogram& sinogram, const Geometry& geometry);

/// ||A x - b||_2.
double residual_norm(const Projector& projector, const Image2D& image, const Sinogram& sinogram);

/// One SART pass over all angles in order, then clip negatives to zero.
void sart_sweep(const Projector& projector, Image2D& image, const Sinogram& sinogram, double lambda);
Image2D sart_sweep(const Image2D& image, const Sinogram& sinogram, const Geometry& geometry, double lambda);

/// Smoothing constant inside the TV square root.
inline constexpr double kTvSmoothing = 1e-8;

/// Isotropic TV with forward differences (zero across the last row/column),
/// shifted so that a constant image has TV exactly 0.
double tv_norm(const Image2D& image);
Image2D tv_gradient(const Image2D& image);

/// Adaptive-weighted TV: each squared difference d^2 is weighted by
/// exp(-(d / delta)^2).
double awtv_norm(const Image2D& image, double delta);
Image2D awtv_gradient(const Image2D& image, double delta);

/// Hyperparameters shared by the TV-regularized algorithms. Integer-valued
/// fields are stored as reals and truncated when used.
struct ReconParams {
    double max_iter = 20;
    double tv_iter = 20;
    double epsilon = 200;
    double alpha = 0.002;
    double alpha_red = 0.95;
    double lambda = 0.99;
    double lambda_red = 0.99;
    double r_max = 0.95;
    double delta = 0.5;
    double rho = 0.5;

    /// Sets fields from a point of an algorithm's parameter space, by name.
    static ReconParams from_position(const ParameterSpace& space, const Position& pos, ReconParams base);
    static ReconParams from_position(const ParameterSpace& space, const Position& pos);
    double* field(std::string_view name) noexcept;
};

struct ReconTrace {
    std::size_t iterations = 0;
    std::vector<double> residuals;  // after each SART sweep
    std::vector<double> tv_step_sizes;
};

/// Alternates SART data steps with steepest-descent TV steps whose size
/// follows the SART update magnitude.
Image2D asd_pocs(const Projector& projector, const Sinogram& sinogram, const ReconParams& params,
                 const Image2D* initial = nullptr, ReconTrace* trace = nullptr);

/// ASD-POCS skeleton with adaptive-weighted TV and a projection-controlled
/// step: the TV path per outer iteration equals a fraction of the SART update,
/// halved whenever the TV block pushes the residual up and beyond epsilon.
Image2D awpcsd(const Projector& projector, const Sinogram& sinogram, const ReconParams& params,
               const Image2D* initial = nullptr, ReconTrace* trace = nullptr);

/// ASD-POCS with descent on rho * TV(x - prior) + (1 - rho) * TV(x).
Image2D piccs(const Projector& projector, const Sinogram& sinogram, const Image2D& prior,
              const ReconParams& params, const Image2D* initial = nullptr, ReconTrace* trace = nullptr);

Image2D reconstruct(ReconAlgorithm algorithm, const Projector& projector, const Sinogram& sinogram,
                    const ReconParams& params, const Image2D* prior = nullptr);

}  // namespace crowtune
