#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "crowtune/param_space.hpp"

namespace crowtune {

/// Sine chaos map x <- sin(pi * x), started from 0.7. Deterministic stand-in
/// for uniform random numbers in (0, 1].
class ChaosStream {
public:
    static constexpr double kSeed = 0.7;

    ChaosStream() = default;
    explicit ChaosStream(double seed) : current_(seed) {}

    double next() noexcept;
    double current() const noexcept { return current_; }

private:
    double current_ = kSeed;
};

using Population = std::vector<Position>;

enum class InitScheme { Random, Lhs, Dlu, Cdlu };

std::string_view to_string(InitScheme scheme) noexcept;
std::optional<InitScheme> parse_init_scheme(std::string_view name) noexcept;

Population init_random(const ParameterSpace& space, std::size_t n, std::uint64_t seed);
Population init_lhs(const ParameterSpace& space, std::size_t n, std::uint64_t seed);
Population init_dlu(const ParameterSpace& space, std::size_t n);

/// Diagonal progression per dimension, reordered by the rank of N fresh chaos
/// values drawn from one stream shared across dimensions (in dimension order).
Population init_cdlu(const ParameterSpace& space, std::size_t n);

/// Dispatch on scheme; `seed` is ignored by the deterministic schemes.
Population initialize(InitScheme scheme, const ParameterSpace& space, std::size_t n,
                      std::uint64_t seed);

/// Grid index of the i-th of n diagonal samples on a grid with `count`
/// points, rounded to the nearest index (halfway toward index 0).
std::size_t diagonal_index(std::size_t i, std::size_t n, std::size_t count) noexcept;

}  // namespace crowtune
