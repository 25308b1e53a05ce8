#include "crowtune/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crowtune {

// ---------------------------------------------------------------------------
// Geometry

Geometry Geometry::parallel(std::size_t n, std::size_t n_angles, std::size_t n_detectors) {
    Geometry g;
    g.n = n;
    g.n_detectors = n_detectors == 0 ? n : n_detectors;
    g.angles.resize(n_angles);
    for (std::size_t a = 0; a < n_angles; ++a) {
        g.angles[a] = std::numbers::pi * static_cast<double>(a) / static_cast<double>(n_angles);
    }
    g.validate();
    return g;
}

void Geometry::validate() const {
    if (n < 2) throw std::invalid_argument("geometry: image size must be >= 2");
    if (angles.empty()) throw std::invalid_argument("geometry: needs at least one angle");
    if (n_detectors < n) throw std::invalid_argument("geometry: n_detectors must be >= n");
}

bool Geometry::matches(const Image2D& image) const noexcept { return image.rows() == n && image.cols() == n; }

bool Geometry::matches(const Sinogram& s) const noexcept {
    return s.n_angles() == n_angles() && s.n_detectors() == n_detectors;
}

// ---------------------------------------------------------------------------
// Projector

Projector::Projector(Geometry geometry) : geometry_(std::move(geometry)) {
    geometry_.validate();
    const std::size_t n = geometry_.n;
    const std::size_t nd = geometry_.n_detectors;
    const std::size_t na = geometry_.n_angles();
    const double centre = 0.5 * static_cast<double>(n - 1);
    const double det_centre = 0.5 * static_cast<double>(nd - 1);
    constexpr double kStep = 0.5;
    const double half_len = std::numbers::sqrt2 * 0.5 * static_cast<double>(n) + 1.0;
    const auto samples = static_cast<std::size_t>(std::ceil(2.0 * half_len / kStep));

    std::vector<double> scratch(n * n, 0.0);
    std::vector<std::uint32_t> touched;
    row_start_.reserve(na * nd + 1);
    row_start_.push_back(0);
    row_sums_.assign(na * nd, 0.0);
    column_sums_.assign(na * n * n, 0.0);

    auto deposit = [&](std::ptrdiff_t r, std::ptrdiff_t c, double w) {
        if (w <= 0.0 || r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(n) ||
            c >= static_cast<std::ptrdiff_t>(n)) {
            return;
        }
        const auto idx = static_cast<std::uint32_t>(static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c));
        if (scratch[idx] == 0.0) touched.push_back(idx);
        scratch[idx] += w;
    };

    for (std::size_t a = 0; a < na; ++a) {
        const double ct = std::cos(geometry_.angles[a]);
        const double st = std::sin(geometry_.angles[a]);
        for (std::size_t k = 0; k < nd; ++k) {
            const double s = static_cast<double>(k) - det_centre;
            for (std::size_t m = 0; m < samples; ++m) {
                const double t = -half_len + (static_cast<double>(m) + 0.5) * kStep;
                const double x = s * ct - t * st;
                const double y = s * st + t * ct;
                // column follows +x, row follows -y
                const double fc = x + centre;
                const double fr = centre - y;
                if (fc <= -1.0 || fr <= -1.0 || fc >= static_cast<double>(n) || fr >= static_cast<double>(n)) {
                    continue;
                }
                const double c0 = std::floor(fc);
                const double r0 = std::floor(fr);
                const double wc = fc - c0;
                const double wr = fr - r0;
                const auto ci = static_cast<std::ptrdiff_t>(c0);
                const auto ri = static_cast<std::ptrdiff_t>(r0);
                deposit(ri, ci, kStep * (1.0 - wr) * (1.0 - wc));
                deposit(ri, ci + 1, kStep * (1.0 - wr) * wc);
                deposit(ri + 1, ci, kStep * wr * (1.0 - wc));
                deposit(ri + 1, ci + 1, kStep * wr * wc);
            }
            std::sort(touched.begin(), touched.end());
            double rs = 0.0;
            double* cs = column_sums_.data() + a * n * n;
            for (auto idx : touched) {
                columns_.push_back(idx);
                values_.push_back(scratch[idx]);
                rs += scratch[idx];
                cs[idx] += scratch[idx];
                scratch[idx] = 0.0;
            }
            touched.clear();
            row_sums_[a * nd + k] = rs;
            row_start_.push_back(values_.size());
        }
    }
}

void Projector::forward_angle(const Image2D& image, std::size_t a, std::span<double> out) const {
    const auto x = image.data();
    const std::size_t nd = geometry_.n_detectors;
    for (std::size_t k = 0; k < nd; ++k) {
        const std::size_t row = a * nd + k;
        double s = 0.0;
        for (std::size_t e = row_start_[row]; e < row_start_[row + 1]; ++e) s += values_[e] * x[columns_[e]];
        out[k] = s;
    }
}

void Projector::back_angle(std::span<const double> values, std::size_t a, Image2D& out) const {
    auto x = out.data();
    const std::size_t nd = geometry_.n_detectors;
    for (std::size_t k = 0; k < nd; ++k) {
        const double v = values[k];
        if (v == 0.0) continue;
        const std::size_t row = a * nd + k;
        for (std::size_t e = row_start_[row]; e < row_start_[row + 1]; ++e) x[columns_[e]] += values_[e] * v;
    }
}

Sinogram Projector::forward(const Image2D& image) const {
    if (!geometry_.matches(image)) throw std::invalid_argument("forward: image does not match geometry");
    Sinogram s(geometry_.n_angles(), geometry_.n_detectors);
    for (std::size_t a = 0; a < geometry_.n_angles(); ++a) forward_angle(image, a, s.row(a));
    return s;
}

Image2D Projector::back(const Sinogram& sinogram) const {
    if (!geometry_.matches(sinogram)) throw std::invalid_argument("back: sinogram does not match geometry");
    Image2D img(geometry_.n, geometry_.n);
    for (std::size_t a = 0; a < geometry_.n_angles(); ++a) back_angle(sinogram.row(a), a, img);
    return img;
}

Sinogram forward_project(const Image2D& image, const Geometry& geometry) {
    return Projector(geometry).forward(image);
}

Image2D back_project(const Sinogram& sinogram, const Geometry& geometry) {
    return Projector(geometry).back(sinogram);
}

double residual_norm(const Projector& projector, const Image2D& image, const Sinogram& sinogram) {
    const Sinogram p = projector.forward(image);
    return distance2(p.data(), sinogram.data());
}

// ---------------------------------------------------------------------------
// SART

void sart_sweep(const Projector& projector, Image2D& image, const Sinogram& sinogram, double lambda) {
    const auto& g = projector.geometry();
    if (!g.matches(image) || !g.matches(sinogram)) throw std::invalid_argument("sart_sweep: shape mismatch");
    const std::size_t nd = g.n_detectors;
    std::vector<double> ray(nd);
    Image2D correction(g.n, g.n);
    auto x = image.data();
    auto corr = correction.data();
    for (std::size_t a = 0; a < g.n_angles(); ++a) {
        projector.forward_angle(image, a, ray);
        const auto b = sinogram.row(a);
        for (std::size_t k = 0; k < nd; ++k) {
            const double rs = projector.row_sum(a, k);
            ray[k] = rs > 0.0 ? (b[k] - ray[k]) / rs : 0.0;
        }
        std::fill(corr.begin(), corr.end(), 0.0);
        projector.back_angle(ray, a, correction);
        const auto cs = projector.column_sums(a);
        for (std::size_t p = 0; p < x.size(); ++p) {
            if (cs[p] > 0.0) x[p] += lambda * corr[p] / cs[p];
        }
    }
    for (auto& v : x) v = std::max(v, 0.0);
}

Image2D sart_sweep(const Image2D& image, const Sinogram& sinogram, const Geometry& geometry, double lambda) {
    Image2D out = image;
    sart_sweep(Projector(geometry), out, sinogram, lambda);
    return out;
}

// ---------------------------------------------------------------------------
// Total variation

namespace {

// Sum over pixels of sqrt(phi(dx) + phi(dy) + mu) - sqrt(mu), where phi(d) is
// d^2 for plain TV and d^2 exp(-(d/delta)^2) for the adaptive-weighted form.
template <class Phi>
double tv_functional(const Image2D& img, Phi phi) {
    const std::size_t rows = img.rows();
    const std::size_t cols = img.cols();
    const double base = std::sqrt(kTvSmoothing);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double dx = c + 1 < cols ? img(r, c + 1) - img(r, c) : 0.0;
            const double dy = r + 1 < rows ? img(r + 1, c) - img(r, c) : 0.0;
            total += std::sqrt(phi.value(dx) + phi.value(dy) + kTvSmoothing) - base;
        }
    }
    return total;
}

template <class Phi>
Image2D tv_functional_gradient(const Image2D& img, Phi phi) {
    const std::size_t rows = img.rows();
    const std::size_t cols = img.cols();
    Image2D g(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double dx = c + 1 < cols ? img(r, c + 1) - img(r, c) : 0.0;
            const double dy = r + 1 < rows ? img(r + 1, c) - img(r, c) : 0.0;
            const double s = std::sqrt(phi.value(dx) + phi.value(dy) + kTvSmoothing);
            const double gx = phi.derivative(dx) / (2.0 * s);
            const double gy = phi.derivative(dy) / (2.0 * s);
            g(r, c) -= gx + gy;
            if (c + 1 < cols) g(r, c + 1) += gx;
            if (r + 1 < rows) g(r + 1, c) += gy;
        }
    }
    return g;
}

struct SquarePhi {
    double value(double d) const noexcept { return d * d; }
    double derivative(double d) const noexcept { return 2.0 * d; }
};

struct WeightedPhi {
    double inv_delta_sq;
    double value(double d) const noexcept { return d * d * std::exp(-d * d * inv_delta_sq); }
    double derivative(double d) const noexcept {
        const double q = d * d * inv_delta_sq;
        return 2.0 * d * std::exp(-q) * (1.0 - q);
    }
};

WeightedPhi weighted_phi(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("awtv: delta must be positive");
    return WeightedPhi{1.0 / (delta * delta)};
}

void require_tv_shape(const Image2D& img) {
    if (img.rows() < 2 || img.cols() < 2) throw std::invalid_argument("tv: image must be >= 2x2");
}

}  // namespace

double tv_norm(const Image2D& image) {
    require_tv_shape(image);
    return tv_functional(image, SquarePhi{});
}

Image2D tv_gradient(const Image2D& image) {
    require_tv_shape(image);
    return tv_functional_gradient(image, SquarePhi{});
}

double awtv_norm(const Image2D& image, double delta) {
    require_tv_shape(image);
    return tv_functional(image, weighted_phi(delta));
}

Image2D awtv_gradient(const Image2D& image, double delta) {
    require_tv_shape(image);
    return tv_functional_gradient(image, weighted_phi(delta));
}

// ---------------------------------------------------------------------------
// Parameters

double* ReconParams::field(std::string_view name) noexcept {
    if (name == "max_iter") return &max_iter;
    if (name == "tv_iter") return &tv_iter;
    if (name == "epsilon") return &epsilon;
    if (name == "alpha") return &alpha;
    if (name == "alpha_red") return &alpha_red;
    if (name == "lambda") return &lambda;
    if (name == "lambda_red") return &lambda_red;
    if (name == "r_max") return &r_max;
    if (name == "delta") return &delta;
    if (name == "rho") return &rho;
    return nullptr;
}

ReconParams ReconParams::from_position(const ParameterSpace& space, const Position& pos, ReconParams base) {
    const auto values = space.values(pos);
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        double* f = base.field(space[d].name);
        if (f == nullptr) throw std::invalid_argument("unknown reconstruction parameter '" + space[d].name + "'");
        *f = values[d];
    }
    return base;
}

ReconParams ReconParams::from_position(const ParameterSpace& space, const Position& pos) {
    return from_position(space, pos, ReconParams{});
}

// ---------------------------------------------------------------------------
// Algorithms

namespace {

std::size_t as_count(double v) { return v <= 0.0 ? 0 : static_cast<std::size_t>(std::lround(v)); }

void check_inputs(const Projector& projector, const Sinogram& sinogram, const Image2D* initial) {
    const auto& g = projector.geometry();
    if (!g.matches(sinogram)) throw std::invalid_argument("reconstruction: sinogram does not match geometry");
    if (initial != nullptr && !g.matches(*initial)) {
        throw std::invalid_argument("reconstruction: initial image does not match geometry");
    }
}

void require_finite(const Image2D& x, const char* who) {
    if (!all_finite(x.data())) throw DegenerateImageError(std::string(who) + ": non-finite image");
}

void clip_negative(Image2D& x) {
    for (auto& v : x.data()) v = std::max(v, 0.0);
}

// Steepest descent: `steps` moves of length `step` along -grad / |grad|.
template <class Grad>
void descend(Image2D& x, std::size_t steps, double step, Grad grad) {
    if (!(step > 0.0)) return;
    for (std::size_t k = 0; k < steps; ++k) {
        const Image2D g = grad(x);
        const double ng = norm2(g.data());
        if (!(ng > 0.0)) return;
        auto xv = x.data();
        const auto gv = g.data();
        const double scale = step / ng;
        for (std::size_t p = 0; p < xv.size(); ++p) xv[p] -= scale * gv[p];
    }
}

template <class Grad>
Image2D asd_pocs_loop(const Projector& projector, const Sinogram& b, const ReconParams& p,
                      const Image2D* initial, ReconTrace* trace, Grad grad, const char* who) {
    check_inputs(projector, b, initial);
    const auto& g = projector.geometry();
    Image2D x = initial != nullptr ? *initial : Image2D(g.n, g.n);
    double lambda = p.lambda;
    double alpha = p.alpha;
    const std::size_t max_iter = as_count(p.max_iter);
    const std::size_t tv_iter = as_count(p.tv_iter);

    for (std::size_t it = 0; it < max_iter; ++it) {
        const Image2D before = x;
        sart_sweep(projector, x, b, lambda);
        lambda *= p.lambda_red;
        const double dd = residual_norm(projector, x, b);
        const double dp = distance2(x.data(), before.data());

        const double dtvg = alpha * dp;
        const Image2D after_data = x;
        descend(x, tv_iter, dtvg, grad);
        const double dg = distance2(x.data(), after_data.data());
        require_finite(x, who);

        if (trace != nullptr) {
            trace->iterations = it + 1;
            trace->residuals.push_back(dd);
            trace->tv_step_sizes.push_back(dtvg);
        }
        if (dg > p.r_max * dp && dd > p.epsilon) alpha *= p.alpha_red;
        if (dd <= p.epsilon && dg <= p.r_max * dp) break;
    }
    clip_negative(x);
    return x;
}

}  // namespace

Image2D asd_pocs(const Projector& projector, const Sinogram& sinogram, const ReconParams& params,
                 const Image2D* initial, ReconTrace* trace) {
    return asd_pocs_loop(projector, sinogram, params, initial, trace,
                         [](const Image2D& x) { return tv_gradient(x); }, "asd_pocs");
}

Image2D piccs(const Projector& projector, const Sinogram& sinogram, const Image2D& prior,
              const ReconParams& params, const Image2D* initial, ReconTrace* trace) {
    if (!projector.geometry().matches(prior)) throw std::invalid_argument("piccs: prior does not match geometry");
    const double rho = params.rho;
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("piccs: rho must lie in [0, 1]");
    auto grad = [&](const Image2D& x) {
        Image2D diff = x;
        auto dv = diff.data();
        const auto pv = prior.data();
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] -= pv[i];
        const Image2D g_prior = tv_gradient(diff);
        Image2D g = tv_gradient(x);
        auto gv = g.data();
        const auto gp = g_prior.data();
        for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = rho * gp[i] + (1.0 - rho) * gv[i];
        return g;
    };
    return asd_pocs_loop(projector, sinogram, params, initial, trace, grad, "piccs");
}

Image2D awpcsd(const Projector& projector, const Sinogram& b, const ReconParams& p, const Image2D* initial,
               ReconTrace* trace) {
    check_inputs(projector, b, initial);
    if (!(p.delta > 0.0)) throw std::invalid_argument("awpcsd: delta must be positive");
    const auto& g = projector.geometry();
    Image2D x = initial != nullptr ? *initial : Image2D(g.n, g.n);
    double lambda = p.lambda;
    double beta = 1.0;
    const std::size_t max_iter = as_count(p.max_iter);
    const std::size_t tv_iter = as_count(p.tv_iter);
    auto grad = [&](const Image2D& img) { return awtv_gradient(img, p.delta); };

    for (std::size_t it = 0; it < max_iter; ++it) {
        const Image2D before = x;
        sart_sweep(projector, x, b, lambda);
        lambda *= p.lambda_red;
        const double dd = residual_norm(projector, x, b);
        const double dp = distance2(x.data(), before.data());

        // the whole TV block travels at most beta * dp
        const double dtvg = tv_iter > 0 ? beta * dp / static_cast<double>(tv_iter) : 0.0;
        descend(x, tv_iter, dtvg, grad);
        require_finite(x, "awpcsd");

        if (trace != nullptr) {
            trace->iterations = it + 1;
            trace->residuals.push_back(dd);
            trace->tv_step_sizes.push_back(dtvg);
        }
        if (dd <= p.epsilon) break;
        const double dd_tv = residual_norm(projector, x, b);
        if (dd_tv > p.epsilon && dd_tv > dd) beta *= 0.5;
    }
    clip_negative(x);
    return x;
}

Image2D reconstruct(ReconAlgorithm algorithm, const Projector& projector, const Sinogram& sinogram,
                    const ReconParams& params, const Image2D* prior) {
    switch (algorithm) {
        case ReconAlgorithm::AsdPocs: return asd_pocs(projector, sinogram, params);
        case ReconAlgorithm::AwPcsd: return awpcsd(projector, sinogram, params);
        case ReconAlgorithm::Piccs:
            if (prior == nullptr) throw std::invalid_argument("piccs requires a prior image");
            return piccs(projector, sinogram, *prior, params);
    }
    throw std::invalid_argument("unknown reconstruction algorithm");
}

}  // namespace crowtune
