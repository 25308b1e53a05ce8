#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "crowtune/image.hpp"
#include "crowtune/recon.hpp"

namespace crowtune {

enum class PhantomKind { SheppLogan, Beads, LinePairs, DiskWithInsert };

std::string_view to_string(PhantomKind kind) noexcept;
std::optional<PhantomKind> parse_phantom_kind(std::string_view name) noexcept;

struct NoiseModel {
    enum class Kind { None, Gaussian, Poisson };
    Kind kind = Kind::None;
    double sigma = 0.0;  ///< gaussian: per-bin standard deviation
    double i0 = 1e5;     ///< poisson: incident counts per bin

    static NoiseModel none() { return {}; }
    static NoiseModel gaussian(double sigma) { return {Kind::Gaussian, sigma, 0.0}; }
    static NoiseModel poisson(double i0) { return {Kind::Poisson, 0.0, i0}; }
};

std::string_view to_string(NoiseModel::Kind kind) noexcept;
std::optional<NoiseModel::Kind> parse_noise_kind(std::string_view name) noexcept;

struct PhantomSpec {
    PhantomKind kind = PhantomKind::SheppLogan;
    std::size_t n = 64;
    /// Unset selects default_intensity(kind).
    std::optional<double> intensity;
    NoiseModel noise;
    std::uint64_t seed = 1;  ///< bead placement
    bool insert = true;      ///< disk_with_insert only

    double effective_intensity() const noexcept;
    void validate() const;
};

/// Peak value per phantom kind, chosen so that a 64x64 phantom seen from 30
/// views gives a sinogram 2-norm between 500 and 2000.
double default_intensity(PhantomKind kind) noexcept;

Image2D make_phantom(const PhantomSpec& spec);

Sinogram simulate_sinogram(const Image2D& phantom, const Projector& projector, const NoiseModel& noise,
                           std::uint64_t seed);
Sinogram simulate_sinogram(const Image2D& phantom, const Geometry& geometry, const NoiseModel& noise,
                           std::uint64_t seed);

/// Keeps every floor(1/keep_fraction)-th angle starting from the first.
std::pair<Sinogram, Geometry> subsample_views(const Sinogram& sinogram, const Geometry& geometry,
                                              double keep_fraction);

}  // namespace crowtune
