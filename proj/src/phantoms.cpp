#include "crowtune/phantoms.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace crowtune {

std::string_view to_string(PhantomKind kind) noexcept {
    switch (kind) {
        case PhantomKind::SheppLogan: return "shepp_logan";
        case PhantomKind::Beads: return "beads";
        case PhantomKind::LinePairs: return "line_pairs";
        case PhantomKind::DiskWithInsert: return "disk_with_insert";
    }
    return "unknown";
}

std::optional<PhantomKind> parse_phantom_kind(std::string_view name) noexcept {
    if (name == "shepp_logan") return PhantomKind::SheppLogan;
    if (name == "beads") return PhantomKind::Beads;
    if (name == "line_pairs") return PhantomKind::LinePairs;
    if (name == "disk_with_insert") return PhantomKind::DiskWithInsert;
    return std::nullopt;
}

std::string_view to_string(NoiseModel::Kind kind) noexcept {
    switch (kind) {
        case NoiseModel::Kind::None: return "none";
        case NoiseModel::Kind::Gaussian: return "gaussian";
        case NoiseModel::Kind::Poisson: return "poisson";
    }
    return "unknown";
}

std::optional<NoiseModel::Kind> parse_noise_kind(std::string_view name) noexcept {
    if (name == "none") return NoiseModel::Kind::None;
    if (name == "gaussian") return NoiseModel::Kind::Gaussian;
    if (name == "poisson") return NoiseModel::Kind::Poisson;
    return std::nullopt;
}

double default_intensity(PhantomKind kind) noexcept {
    switch (kind) {
        case PhantomKind::SheppLogan: return 2.0;
        case PhantomKind::Beads: return 1.0;
        case PhantomKind::LinePairs: return 1.0;
        case PhantomKind::DiskWithInsert: return 1.0;
    }
    return 1.0;
}

double PhantomSpec::effective_intensity() const noexcept {
    return intensity.value_or(default_intensity(kind));
}

void PhantomSpec::validate() const {
    if (n < 16) throw std::invalid_argument("phantom size must be >= 16");
    if (!(effective_intensity() > 0.0)) throw std::invalid_argument("phantom intensity must be positive");
    if (noise.kind == NoiseModel::Kind::Gaussian && !(noise.sigma >= 0.0)) {
        throw std::invalid_argument("gaussian sigma must be >= 0");
    }
    if (noise.kind == NoiseModel::Kind::Poisson && !(noise.i0 > 0.0)) {
        throw std::invalid_argument("poisson i0 must be positive");
    }
}

namespace {

struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
};

// Modified (higher-contrast) Shepp-Logan set on [-1, 1]^2.
constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

bool inside(const Ellipse& e, double x, double y) {
    const double phi = e.phi_deg * std::numbers::pi / 180.0;
    const double dx = x - e.x0;
    const double dy = y - e.y0;
    const double u = dx * std::cos(phi) + dy * std::sin(phi);
    const double v = -dx * std::sin(phi) + dy * std::cos(phi);
    return (u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) <= 1.0;
}

// Normalized coordinates of pixel (r, c): x to the right, y up, both in [-1, 1].
struct Coords {
    double x, y;
};
Coords coords(std::size_t r, std::size_t c, std::size_t n) {
    const double h = 0.5 * static_cast<double>(n);
    return {(static_cast<double>(c) + 0.5 - h) / h, (h - static_cast<double>(r) - 0.5) / h};
}

template <class F>
Image2D rasterize(std::size_t n, F f) {
    Image2D img(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const auto p = coords(r, c, n);
            img(r, c) = f(p.x, p.y, r, c);
        }
    }
    return img;
}

Image2D shepp_logan(std::size_t n, double intensity) {
    return rasterize(n, [&](double x, double y, std::size_t, std::size_t) {
        double v = 0.0;
        for (const auto& e : kSheppLogan) {
            if (inside(e, x, y)) v += e.value;
        }
        return std::max(0.0, v) * intensity;
    });
}

Image2D beads(std::size_t n, double intensity, std::uint64_t seed) {
    constexpr double kOuter = 0.90;
    constexpr double kInner = 0.80;
    constexpr double kBead = 0.085;
    constexpr double kGap = 0.01;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-kInner, kInner);
    std::vector<std::pair<double, double>> centres;
    for (int attempt = 0; attempt < 20000; ++attempt) {
        const double cx = u(rng);
        const double cy = u(rng);
        if (std::hypot(cx, cy) > kInner - kBead - kGap) continue;
        bool clear = true;
        for (const auto& [ox, oy] : centres) {
            if (std::hypot(cx - ox, cy - oy) < 2.0 * kBead + kGap) {
                clear = false;
                break;
            }
        }
        if (clear) centres.emplace_back(cx, cy);
    }
    return rasterize(n, [&](double x, double y, std::size_t, std::size_t) {
        const double r = std::hypot(x, y);
        if (r >= kInner && r <= kOuter) return 0.6 * intensity;
        for (const auto& [cx, cy] : centres) {
            if (std::hypot(x - cx, y - cy) <= kBead) return intensity;
        }
        return 0.0;
    });
}

Image2D line_pairs(std::size_t n, double intensity) {
    // four bar groups, coarsest top-left, finest bottom-right
    const double scale = static_cast<double>(n) / 64.0;
    const std::array<double, 4> pitch{8.0 * scale, 6.0 * scale, 4.0 * scale, 2.0 * scale};
    const std::array<Coords, 4> centre{{{-0.38, 0.38}, {0.38, 0.38}, {-0.38, -0.38}, {0.38, -0.38}}};
    constexpr double kHalf = 0.28;
    const double h = 0.5 * static_cast<double>(n);
    return rasterize(n, [&](double x, double y, std::size_t, std::size_t c) {
        if (std::hypot(x, y) > 0.92) return 0.0;
        for (std::size_t g = 0; g < 4; ++g) {
            if (std::abs(x - centre[g].x) < kHalf && std::abs(y - centre[g].y) < kHalf) {
                const double left = (centre[g].x - kHalf) * h + h;
                const double p = std::max(2.0, pitch[g]);
                const auto bar = static_cast<long>(std::floor((static_cast<double>(c) - left) / (0.5 * p)));
                return bar % 2 == 0 ? intensity : 0.2 * intensity;
            }
        }
        return 0.2 * intensity;
    });
}

constexpr double kInsertX = 0.35;
constexpr double kInsertY = 0.30;
constexpr double kInsertR = 0.09;

Image2D disk_with_insert(std::size_t n, double intensity, bool with_insert) {
    const Ellipse bright{0.3, 0.25, 0.15, -0.3, 0.2, 30.0};
    const Ellipse dark{-0.2, 0.15, 0.15, 0.25, -0.3, 0.0};
    return rasterize(n, [&](double x, double y, std::size_t, std::size_t) {
        if (with_insert && std::hypot(x - kInsertX, y - kInsertY) <= kInsertR) return 2.0 * intensity;
        if (std::hypot(x, y) > 0.8) return 0.0;
        double v = 0.5 + 0.1 * std::sin(3.0 * std::numbers::pi * x) * std::sin(3.0 * std::numbers::pi * y);
        if (inside(bright, x, y)) v += bright.value;
        if (inside(dark, x, y)) v += dark.value;
        return v * intensity;
    });
}

}  // namespace

Image2D make_phantom(const PhantomSpec& spec) {
    spec.validate();
    const double intensity = spec.effective_intensity();
    switch (spec.kind) {
        case PhantomKind::SheppLogan: return shepp_logan(spec.n, intensity);
        case PhantomKind::Beads: return beads(spec.n, intensity, spec.seed);
        case PhantomKind::LinePairs: return line_pairs(spec.n, intensity);
        case PhantomKind::DiskWithInsert: return disk_with_insert(spec.n, intensity, spec.insert);
    }
    throw std::invalid_argument("unknown phantom kind");
}

Sinogram simulate_sinogram(const Image2D& phantom, const Projector& projector, const NoiseModel& noise,
                           std::uint64_t seed) {
    Sinogram s = projector.forward(phantom);
    std::mt19937_64 rng(seed);
    switch (noise.kind) {
        case NoiseModel::Kind::None: break;
        case NoiseModel::Kind::Gaussian: {
            std::normal_distribution<double> e(0.0, noise.sigma);
            for (auto& v : s.data()) v += e(rng);
            break;
        }
        case NoiseModel::Kind::Poisson: {
            for (auto& v : s.data()) {
                const double mean = noise.i0 * std::exp(-v);
                std::poisson_distribution<long long> counts(mean);
                const double c = std::max<double>(1.0, static_cast<double>(counts(rng)));
                v = -std::log(c / noise.i0);
            }
            break;
        }
    }
    return s;
}

Sinogram simulate_sinogram(const Image2D& phantom, const Geometry& geometry, const NoiseModel& noise,
                           std::uint64_t seed) {
    return simulate_sinogram(phantom, Projector(geometry), noise, seed);
}

std::pair<Sinogram, Geometry> subsample_views(const Sinogram& sinogram, const Geometry& geometry,
                                              double keep_fraction) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        throw std::invalid_argument("keep_fraction must lie in (0, 1]");
    }
    if (!geometry.matches(sinogram)) throw std::invalid_argument("subsample_views: sinogram does not match geometry");
    const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(1.0 / keep_fraction + 1e-9)));
    Geometry g = geometry;
    g.angles.clear();
    std::vector<std::size_t> kept;
    for (std::size_t a = 0; a < geometry.n_angles(); a += stride) {
        kept.push_back(a);
        g.angles.push_back(geometry.angles[a]);
    }
    Sinogram out(kept.size(), sinogram.n_detectors());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto src = sinogram.row(kept[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return {std::move(out), std::move(g)};
}

}  // namespace crowtune
