#include "crowtune/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace crowtune {

namespace {
// Absorbs representation error in quotients such as (0.1 - 0.0001) / 0.0001.
constexpr double kGridTolerance = 1e-9;
}  // namespace

ParameterSpec::ParameterSpec(std::string name_, double min_, double max_, double step_)
    : name(std::move(name_)), min(min_), max(max_), step(step_) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("parameter '" + name + "': step must be positive");
    }
    if (!(min <= max) || !std::isfinite(min) || !std::isfinite(max)) {
        throw std::invalid_argument("parameter '" + name + "': requires min <= max");
    }
    count_ = static_cast<std::size_t>(std::floor((max - min) / step + kGridTolerance)) + 1;
}

std::size_t ParameterSpec::snap_index(double raw) const noexcept {
    if (std::isnan(raw)) return 0;
    const double clamped = std::clamp(raw, min, max);
    const double f = (clamped - min) / step;
    const double lower = std::floor(f);
    auto k = static_cast<std::size_t>(lower);
    if (f - lower > 0.5 + kGridTolerance) ++k;
    return std::min(k, count_ - 1);
}

std::size_t grid_index(const ParameterSpec& spec, double value) {
    const double f = (value - spec.min) / spec.step;
    const double k = std::round(f);
    if (std::abs(f - k) > 1e-6 || k < 0.0 || k >= static_cast<double>(spec.count())) {
        throw OffGridError("value " + std::to_string(value) + " is not on the grid of '" +
                           spec.name + "'");
    }
    return static_cast<std::size_t>(k);
}

ParameterSpace::ParameterSpace(std::vector<ParameterSpec> specs) : specs_(std::move(specs)) {
    std::set<std::string, std::less<>> names;
    for (const auto& s : specs_) {
        if (!names.insert(s.name).second) {
            throw std::invalid_argument("duplicate parameter name '" + s.name + "'");
        }
    }
}

std::optional<std::size_t> ParameterSpace::find(std::string_view name) const noexcept {
    for (std::size_t d = 0; d < specs_.size(); ++d) {
        if (specs_[d].name == name) return d;
    }
    return std::nullopt;
}

std::vector<double> ParameterSpace::values(const Position& pos) const {
    if (pos.size() != dimension()) {
        throw DimensionError("position has " + std::to_string(pos.size()) +
                             " coordinates, space has " + std::to_string(dimension()));
    }
    std::vector<double> out(dimension());
    for (std::size_t d = 0; d < dimension(); ++d) out[d] = specs_[d].value(pos.index[d]);
    return out;
}

Position ParameterSpace::snap(std::span<const double> raw) const {
    if (raw.size() != dimension()) {
        throw DimensionError("raw vector has " + std::to_string(raw.size()) +
                             " coordinates, space has " + std::to_string(dimension()));
    }
    Position pos;
    pos.index.resize(dimension());
    for (std::size_t d = 0; d < dimension(); ++d) pos.index[d] = specs_[d].snap_index(raw[d]);
    return pos;
}

bool ParameterSpace::on_grid(const Position& pos) const noexcept {
    if (pos.size() != dimension()) return false;
    for (std::size_t d = 0; d < dimension(); ++d) {
        if (pos.index[d] >= specs_[d].count()) return false;
    }
    return true;
}

std::string_view to_string(ReconAlgorithm algorithm) noexcept {
    switch (algorithm) {
        case ReconAlgorithm::AsdPocs: return "asd-pocs";
        case ReconAlgorithm::AwPcsd: return "awpcsd";
        case ReconAlgorithm::Piccs: return "piccs";
    }
    return "unknown";
}

std::optional<ReconAlgorithm> parse_recon_algorithm(std::string_view name) noexcept {
    if (name == "asd-pocs" || name == "asd_pocs" || name == "ASD-POCS") return ReconAlgorithm::AsdPocs;
    if (name == "awpcsd" || name == "AwPCSD") return ReconAlgorithm::AwPcsd;
    if (name == "piccs" || name == "PICCS") return ReconAlgorithm::Piccs;
    return std::nullopt;
}

ParameterSpace preset_space(ReconAlgorithm algorithm) {
    const ParameterSpec max_iter{"max_iter", 5, 50, 1};
    const ParameterSpec tv_iter{"tv_iter", 5, 50, 1};
    const ParameterSpec epsilon{"epsilon", 50, 1500, 10};
    const ParameterSpec alpha{"alpha", 0.0001, 0.1, 0.0001};
    const ParameterSpec alpha_red{"alpha_red", 0.9, 0.99, 0.01};
    const ParameterSpec lambda{"lambda", 0.9, 0.99, 0.01};
    const ParameterSpec lambda_red{"lambda_red", 0.9, 0.99, 0.01};
    const ParameterSpec r_max{"r_max", 0.9, 0.99, 0.01};
    const ParameterSpec delta{"delta", 0.005, 2, 0.005};

    switch (algorithm) {
        case ReconAlgorithm::AwPcsd:
            return ParameterSpace({max_iter, tv_iter, epsilon, lambda, lambda_red, delta});
        case ReconAlgorithm::AsdPocs:
        case ReconAlgorithm::Piccs:
            break;
    }
    return ParameterSpace({max_iter, tv_iter, epsilon, alpha, alpha_red, lambda, lambda_red, r_max});
}

}  // namespace crowtune
