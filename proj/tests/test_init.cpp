#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "crowtune/init.hpp"
#include "oracles.hpp"

using namespace crowtune;

namespace {

std::vector<std::size_t> column(const Population& pop, std::size_t d) {
    std::vector<std::size_t> out;
    for (const auto& p : pop) out.push_back(p.index[d]);
    return out;
}

// DLU oracle: real-valued progression snapped onto the grid.
std::vector<std::size_t> dlu_oracle(const ParameterSpec& s, std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = s.min + static_cast<double>(i) * (s.max - s.min) / static_cast<double>(n - 1);
        out.push_back(s.snap_index(v));
    }
    return out;
}

}  // namespace

TEST_CASE("chaos stream") {
    ChaosStream c;
    CHECK(c.next() == doctest::Approx(std::sin(0.7 * std::numbers::pi)).epsilon(1e-15));
    CHECK(c.next() == doctest::Approx(0.564635).epsilon(1e-6));
    ChaosStream d;
    for (double expected : oracle::kChaos) CHECK(d.next() == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("chaos values stay in (0, 1] and do not repeat over 200 draws") {
    ChaosStream c;
    std::set<double> seen;
    for (int i = 0; i < 200; ++i) {
        const double v = c.next();
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
        REQUIRE(seen.insert(v).second);
    }
}

TEST_CASE("random init") {
    const auto space = preset_space(ReconAlgorithm::AsdPocs);
    const auto a = init_random(space, 25, 3);
    CHECK(a == init_random(space, 25, 3));
    CHECK(a != init_random(space, 25, 4));
    for (const auto& p : a) CHECK(space.on_grid(p));

    const ParameterSpace ten({ParameterSpec("x", 0.9, 0.99, 0.01)});
    const auto big = init_random(ten, 1000, 5);
    std::vector<int> hist(10, 0);
    for (const auto& p : big) ++hist[p.index[0]];
    const double sd = std::sqrt(1000 * 0.1 * 0.9);
    for (int h : hist) CHECK(std::abs(h - 100.0) <= 4.0 * sd);
}

TEST_CASE("lhs init") {
    const auto space = preset_space(ReconAlgorithm::AsdPocs);
    const auto pop = init_lhs(space, 25, 9);
    CHECK(pop == init_lhs(space, 25, 9));
    for (const auto& p : pop) CHECK(space.on_grid(p));
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        const std::size_t count = space[d].count();
        if (count < 25) continue;
        // integer strata [floor(s*count/N), floor((s+1)*count/N))
        std::vector<int> bins(25, 0);
        for (auto k : column(pop, d)) {
            for (std::size_t s = 0; s < 25; ++s) {
                if (s * count / 25 <= k && k < (s + 1) * count / 25) ++bins[s];
            }
        }
        for (int b : bins) CHECK(b == 1);
    }
    // count-1000 grid: 40-index strata
    const auto alpha = column(pop, *space.find("alpha"));
    std::set<std::size_t> strata;
    for (auto k : alpha) strata.insert(k / 40);
    CHECK(strata.size() == 25);
}

TEST_CASE("dlu init") {
    const auto space = preset_space(ReconAlgorithm::AsdPocs);
    const auto pop = init_dlu(space, 25);
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        CHECK(pop.front().index[d] == 0);
        CHECK(pop.back().index[d] == space[d].count() - 1);
    }
    const auto eps = *space.find("epsilon");
    CHECK(space.values(pop[12])[eps] == doctest::Approx(770.0));
    for (std::size_t d = 0; d < space.dimension(); ++d) CHECK(column(pop, d) == dlu_oracle(space[d], 25));
}

TEST_CASE("cdlu small example") {
    const ParameterSpace s({ParameterSpec("a", 0, 2, 1), ParameterSpec("b", 0, 2, 1)});
    const auto pop = init_cdlu(s, 3);
    // dimension 1 draws (0.809, 0.565, 0.979): ranks (2, 1, 3)
    CHECK(column(pop, 0) == std::vector<std::size_t>{1, 0, 2});
    // dimension 2 draws (0.064, 0.201, 0.591): ranks (1, 2, 3)
    CHECK(column(pop, 1) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("cdlu contract") {
    for (auto alg : {ReconAlgorithm::AsdPocs, ReconAlgorithm::AwPcsd}) {
        const auto space = preset_space(alg);
        const auto pop = init_cdlu(space, 25);
        CHECK(pop == init_cdlu(space, 25));
        const auto dlu = init_dlu(space, 25);
        for (std::size_t d = 0; d < space.dimension(); ++d) {
            auto got = column(pop, d);
            const auto ref = column(dlu, d);
            CHECK(got != ref);  // not the identity ordering
            std::sort(got.begin(), got.end());
            CHECK(got == ref);
        }
    }
}

TEST_CASE("initialize dispatch and N guard") {
    const auto space = preset_space(ReconAlgorithm::AwPcsd);
    CHECK(initialize(InitScheme::Cdlu, space, 7, 1) == init_cdlu(space, 7));
    CHECK(initialize(InitScheme::Dlu, space, 7, 1) == init_dlu(space, 7));
    CHECK(initialize(InitScheme::Lhs, space, 7, 1) == init_lhs(space, 7, 1));
    CHECK(initialize(InitScheme::Random, space, 7, 1) == init_random(space, 7, 1));
    CHECK_THROWS_AS(init_cdlu(space, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_random(space, 1, 0), std::invalid_argument);
    for (auto sc : {InitScheme::Random, InitScheme::Lhs, InitScheme::Dlu, InitScheme::Cdlu}) {
        CHECK(parse_init_scheme(to_string(sc)) == sc);
    }
}

TEST_CASE("diagonal_index") {
    CHECK(diagonal_index(0, 25, 146) == 0);
    CHECK(diagonal_index(24, 25, 146) == 145);
    CHECK(diagonal_index(12, 25, 146) == 72);  // 72.5 rounds down
    CHECK(diagonal_index(1, 3, 10) == 4);      // 4.5 rounds down
}
