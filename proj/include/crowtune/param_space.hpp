#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crowtune {

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class OffGridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// One tunable hyperparameter discretized as min + k*step, 0 <= k < count().
struct ParameterSpec {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    ParameterSpec() = default;
    ParameterSpec(std::string name, double min, double max, double step);

    std::size_t count() const noexcept { return count_; }
    double value(std::size_t k) const noexcept { return min + static_cast<double>(k) * step; }
    double range() const noexcept { return max - min; }

    // Clamp to [min, max], then round to the nearest grid index. Exact halfway
    // points resolve toward min.
    std::size_t snap_index(double raw) const noexcept;

private:
    std::size_t count_ = 1;
};

// Grid index of an on-grid value; throws OffGridError otherwise.
std::size_t grid_index(const ParameterSpec& spec, double value);

// Candidate solution. Grid indices are canonical; real values are only
// materialized through the owning ParameterSpace.
struct Position {
    std::vector<std::size_t> index;

    std::size_t size() const noexcept { return index.size(); }
    friend auto operator<=>(const Position&, const Position&) = default;
};

class ParameterSpace {
public:
    ParameterSpace() = default;
    explicit ParameterSpace(std::vector<ParameterSpec> specs);

    std::size_t dimension() const noexcept { return specs_.size(); }
    const ParameterSpec& operator[](std::size_t d) const { return specs_.at(d); }
    std::span<const ParameterSpec> specs() const noexcept { return specs_; }
    std::optional<std::size_t> find(std::string_view name) const noexcept;

    std::vector<double> values(const Position& pos) const;
    Position snap(std::span<const double> raw) const;
    bool on_grid(const Position& pos) const noexcept;

private:
    std::vector<ParameterSpec> specs_;
};

enum class ReconAlgorithm { AsdPocs, AwPcsd, Piccs };

std::string_view to_string(ReconAlgorithm algorithm) noexcept;
std::optional<ReconAlgorithm> parse_recon_algorithm(std::string_view name) noexcept;

// Hyperparameter grids for the three reconstruction algorithms.
ParameterSpace preset_space(ReconAlgorithm algorithm);

}  // namespace crowtune
