#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace crowtune {

/// Row-major dense 2D array of doubles.
class Array2D {
public:
    Array2D() = default;
    Array2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Array2D(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("Array2D: size mismatch");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    bool same_shape(const Array2D& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const Array2D&, const Array2D&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Reconstruction-domain slice (attenuation per unit length).
class Image2D : public Array2D {
public:
    using Array2D::Array2D;
    Image2D() = default;
    explicit Image2D(Array2D a) : Array2D(std::move(a)) {}
};

/// Line integrals, one row per projection angle, one column per detector bin.
class Sinogram : public Array2D {
public:
    using Array2D::Array2D;
    Sinogram() = default;
    explicit Sinogram(Array2D a) : Array2D(std::move(a)) {}

    std::size_t n_angles() const noexcept { return rows(); }
    std::size_t n_detectors() const noexcept { return cols(); }
};

/// Stack of K slices.
using Volume = std::vector<Image2D>;

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;
double distance2(std::span<const double> a, std::span<const double> b) noexcept;
bool all_finite(std::span<const double> a) noexcept;
double min_value(std::span<const double> a) noexcept;
double max_value(std::span<const double> a) noexcept;

}  // namespace crowtune
