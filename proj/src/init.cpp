#include "crowtune/init.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace crowtune {

namespace {

void require_population(std::size_t n) {
    if (n < 2) throw std::invalid_argument("population size must be at least 2");
}

Population empty_population(const ParameterSpace& space, std::size_t n) {
    Population pop(n);
    for (auto& p : pop) p.index.assign(space.dimension(), 0);
    return pop;
}

}  // namespace

double ChaosStream::next() noexcept {
    current_ = std::sin(std::numbers::pi * current_);
    return current_;
}

std::string_view to_string(InitScheme scheme) noexcept {
    switch (scheme) {
        case InitScheme::Random: return "random";
        case InitScheme::Lhs: return "lhs";
        case InitScheme::Dlu: return "dlu";
        case InitScheme::Cdlu: return "cdlu";
    }
    return "unknown";
}

std::optional<InitScheme> parse_init_scheme(std::string_view name) noexcept {
    if (name == "random") return InitScheme::Random;
    if (name == "lhs") return InitScheme::Lhs;
    if (name == "dlu") return InitScheme::Dlu;
    if (name == "cdlu") return InitScheme::Cdlu;
    return std::nullopt;
}

Population init_random(const ParameterSpace& space, std::size_t n, std::uint64_t seed) {
    require_population(n);
    std::mt19937_64 rng(seed);
    auto pop = empty_population(space, n);
    for (auto& p : pop) {
        for (std::size_t d = 0; d < space.dimension(); ++d) {
            std::uniform_int_distribution<std::size_t> pick(0, space[d].count() - 1);
            p.index[d] = pick(rng);
        }
    }
    return pop;
}

Population init_lhs(const ParameterSpace& space, std::size_t n, std::uint64_t seed) {
    require_population(n);
    std::mt19937_64 rng(seed);
    auto pop = empty_population(space, n);
    std::vector<std::size_t> strata(n);
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        const std::size_t count = space[d].count();
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        std::shuffle(strata.begin(), strata.end(), rng);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t s = strata[i];
            if (count >= n) {
                const std::size_t lo = s * count / n;
                const std::size_t hi = (s + 1) * count / n;
                std::uniform_int_distribution<std::size_t> pick(lo, hi - 1);
                pop[i].index[d] = pick(rng);
            } else {
                // Fewer grid points than strata: sample the real-valued stratum
                // and take the grid cell it falls in.
                std::uniform_real_distribution<double> u(0.0, 1.0);
                const double x = (static_cast<double>(s) + u(rng)) * static_cast<double>(count) /
                                 static_cast<double>(n);
                pop[i].index[d] = std::min(static_cast<std::size_t>(x), count - 1);
            }
        }
    }
    return pop;
}

std::size_t diagonal_index(std::size_t i, std::size_t n, std::size_t count) noexcept {
    if (n < 2) return 0;
    // nearest integer to i*(count-1)/(n-1), halfway rounds down, in exact
    // integer arithmetic
    const std::size_t num = i * (count - 1);
    const std::size_t den = n - 1;
    const std::size_t q = num / den;
    const std::size_t r = num % den;
    return (2 * r > den) ? q + 1 : q;
}

Population init_dlu(const ParameterSpace& space, std::size_t n) {
    require_population(n);
    auto pop = empty_population(space, n);
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        for (std::size_t i = 0; i < n; ++i) pop[i].index[d] = diagonal_index(i, n, space[d].count());
    }
    return pop;
}

Population init_cdlu(const ParameterSpace& space, std::size_t n) {
    auto pop = init_dlu(space, n);
    ChaosStream chaos;
    std::vector<double> draws(n);
    std::vector<std::size_t> order(n);
    std::vector<std::size_t> column(n);
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        for (auto& c : draws) c = chaos.next();
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return draws[a] < draws[b]; });
        // order[r] is the individual whose draw has rank r; it receives the
        // r-th value of the ascending progression.
        for (std::size_t i = 0; i < n; ++i) column[i] = pop[i].index[d];
        for (std::size_t r = 0; r < n; ++r) pop[order[r]].index[d] = column[r];
    }
    return pop;
}

Population initialize(InitScheme scheme, const ParameterSpace& space, std::size_t n,
                      std::uint64_t seed) {
    switch (scheme) {
        case InitScheme::Random: return init_random(space, n, seed);
        case InitScheme::Lhs: return init_lhs(space, n, seed);
        case InitScheme::Dlu: return init_dlu(space, n);
        case InitScheme::Cdlu: return init_cdlu(space, n);
    }
    throw std::invalid_argument("unknown init scheme");
}

}  // namespace crowtune
