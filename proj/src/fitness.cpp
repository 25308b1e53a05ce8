#include "crowtune/fitness.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace crowtune {

namespace {

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex, FftwFree>;

// FFTW planner calls are not thread-safe; execution with a private plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void require_slices(const Volume& volume) {
    if (volume.empty()) throw std::invalid_argument("volume has no slices");
}

}  // namespace

void FitnessConfig::validate() const {
    if (!(eta >= 0.0) || !(xi >= 0.0)) throw std::invalid_argument("eta and xi must be >= 0");
    if (!(eta + xi > 0.0)) throw std::invalid_argument("eta + xi must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
}

double snr(const Image2D& slice) {
    const auto px = slice.data();
    if (px.size() < 2) throw std::invalid_argument("snr: slice needs at least 2 pixels");
    const double n = static_cast<double>(px.size());
    double mean = 0.0;
    for (double v : px) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : px) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    if (!(sd > 0.0) || !std::isfinite(sd)) {
        throw DegenerateImageError("snr: slice has zero standard deviation");
    }
    return mean / sd;
}

double snr(const Volume& volume) {
    require_slices(volume);
    double s = 0.0;
    for (const auto& slice : volume) s += snr(slice);
    return s / static_cast<double>(volume.size());
}

Array2D power_spectrum(const Image2D& slice) {
    const std::size_t rows = slice.rows();
    const std::size_t cols = slice.cols();
    if (rows < 2 || cols < 2) throw std::invalid_argument("power_spectrum: slice must be >= 2x2");

    const std::size_t n = rows * cols;
    FftwBuffer in(fftw_alloc_complex(n));
    FftwBuffer out(fftw_alloc_complex(n));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), in.get(), out.get(),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    const auto px = slice.data();
    for (std::size_t i = 0; i < n; ++i) {
        in.get()[i][0] = px[i];
        in.get()[i][1] = 0.0;
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    Array2D p(rows, cols);
    const std::size_t r0 = rows / 2;
    const std::size_t c0 = cols / 2;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t sr = (r + rows - r0) % rows;  // centered row -> frequency row
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t sc = (c + cols - c0) % cols;
            const auto& z = out.get()[sr * cols + sc];
            p(r, c) = z[0] * z[0] + z[1] * z[1];
        }
    }
    return p;
}

double radial_frequency(std::size_t r, std::size_t c, std::size_t rows, std::size_t cols) noexcept {
    const double u = static_cast<double>(r) - static_cast<double>(rows / 2);
    const double v = static_cast<double>(c) - static_cast<double>(cols / 2);
    return std::sqrt(u * u + v * v);
}

double max_radial_frequency(std::size_t rows, std::size_t cols) noexcept {
    const double u = static_cast<double>(rows / 2);
    const double v = static_cast<double>(cols / 2);
    return std::sqrt(u * u + v * v);
}

double hfer(const Image2D& slice, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("hfer: gamma must lie in (0, 1)");
    const Array2D p = power_spectrum(slice);
    const double cutoff = gamma * max_radial_frequency(p.rows(), p.cols());
    double total = 0.0;
    double high = 0.0;
    for (std::size_t r = 0; r < p.rows(); ++r) {
        for (std::size_t c = 0; c < p.cols(); ++c) {
            total += p(r, c);
            if (radial_frequency(r, c, p.rows(), p.cols()) > cutoff) high += p(r, c);
        }
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DegenerateImageError("hfer: slice has zero spectral energy");
    }
    return high / total;
}

double hfer(const Volume& volume, double gamma) {
    require_slices(volume);
    double s = 0.0;
    for (const auto& slice : volume) s += hfer(slice, gamma);
    return s / static_cast<double>(volume.size());
}

double laplacian_variance(const Volume& volume) {
    require_slices(volume);
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (const auto& s : volume) {
        if (s.rows() < 3 || s.cols() < 3) {
            throw std::invalid_argument("laplacian_variance: slice must be >= 3x3");
        }
        for (std::size_t r = 1; r + 1 < s.rows(); ++r) {
            for (std::size_t c = 1; c + 1 < s.cols(); ++c) {
                const double v = s(r - 1, c) + s(r + 1, c) + s(r, c - 1) + s(r, c + 1) - 4.0 * s(r, c);
                sum += v;
                sum_sq += v * v;
                ++count;
            }
        }
    }
    const double n = static_cast<double>(count);
    const double mean = sum / n;
    return std::max(0.0, sum_sq / n - mean * mean);
}

double combine(const FitnessConfig& config, double snr_value, double hfer_value) noexcept {
    return config.eta * (1.0 / snr_value) + config.xi * (1.0 - hfer_value);
}

FitnessReport evaluate(const Volume& volume, const FitnessConfig& config) {
    config.validate();
    FitnessReport rep;
    rep.snr = snr(volume);
    rep.hfer = hfer(volume, config.gamma);
    bool lap_ok = true;
    for (const auto& s : volume) lap_ok = lap_ok && s.rows() >= 3 && s.cols() >= 3;
    if (lap_ok) rep.laplacian_var = laplacian_variance(volume);
    rep.objectives = {1.0 / rep.snr, 1.0 - rep.hfer};
    rep.fitness = config.eta * rep.objectives.inv_snr + config.xi * rep.objectives.hfer_deficit;
    return rep;
}

FitnessReport evaluate(const Image2D& slice, const FitnessConfig& config) {
    return evaluate(Volume{slice}, config);
}

}  // namespace crowtune
