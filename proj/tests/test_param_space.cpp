#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crowtune/param_space.hpp"

using namespace crowtune;

namespace {

const ParameterSpec& spec_of(const ParameterSpace& s, const char* name) { return s[*s.find(name)]; }

}  // namespace

TEST_CASE("preset grids") {
    const auto asd = preset_space(ReconAlgorithm::AsdPocs);
    CHECK(asd.dimension() == 8);
    const auto& alpha = spec_of(asd, "alpha");
    CHECK(alpha.min == doctest::Approx(0.0001));
    CHECK(alpha.max == doctest::Approx(0.1));
    CHECK(alpha.step == doctest::Approx(0.0001));
    CHECK(alpha.count() == 1000);
    const auto& eps = spec_of(asd, "epsilon");
    CHECK(eps.min == 50);
    CHECK(eps.max == 1500);
    CHECK(eps.step == 10);
    CHECK(eps.count() == 146);
    CHECK(spec_of(asd, "max_iter").count() == 46);
    CHECK(spec_of(asd, "tv_iter").count() == 46);
    for (const char* n : {"alpha_red", "lambda", "lambda_red", "r_max"}) CHECK(spec_of(asd, n).count() == 10);
    CHECK_FALSE(asd.find("delta"));

    const auto aw = preset_space(ReconAlgorithm::AwPcsd);
    CHECK(aw.dimension() == 6);
    const auto& delta = spec_of(aw, "delta");
    CHECK(delta.min == doctest::Approx(0.005));
    CHECK(delta.max == doctest::Approx(2.0));
    CHECK(delta.step == doctest::Approx(0.005));
    CHECK(delta.count() == 400);
    for (const char* n : {"alpha", "alpha_red", "r_max"}) CHECK_FALSE(aw.find(n));

    const auto pic = preset_space(ReconAlgorithm::Piccs);
    CHECK(pic.dimension() == 8);
    for (std::size_t d = 0; d < 8; ++d) CHECK(pic[d].name == asd[d].name);
}

TEST_CASE("snap examples") {
    const ParameterSpec alpha("alpha", 0.0001, 0.1, 0.0001);
    CHECK(alpha.value(alpha.snap_index(0.00014)) == doctest::Approx(0.0001));
    CHECK(alpha.snap_index(0.00015) == 0);  // halfway goes toward min
    CHECK(alpha.snap_index(0.00016) == 1);
    const ParameterSpec eps("epsilon", 50, 1500, 10);
    CHECK(eps.value(eps.snap_index(2000)) == 1500);
    CHECK(eps.value(eps.snap_index(-3)) == 50);
    CHECK(eps.snap_index(775) == 72);
    const ParameterSpec lam("lambda", 0.9, 0.99, 0.01);
    CHECK(lam.value(lam.snap_index(0.934)) == doctest::Approx(0.93));
}

TEST_CASE("space snap validates dimension") {
    const auto s = preset_space(ReconAlgorithm::AwPcsd);
    const std::vector<double> raw(5, 0.0);
    CHECK_THROWS_AS(s.snap(raw), DimensionError);
    const std::vector<double> ok{7.4, 100.0, 333.0, 0.955, 2.0, 0.0126};
    const auto p = s.snap(ok);
    const auto v = s.values(p);
    CHECK(v[0] == 7);
    CHECK(v[2] == 330);
    CHECK(v[3] == doctest::Approx(0.95));  // 0.955 sits halfway
    CHECK(v[4] == doctest::Approx(0.99));
    CHECK(v[5] == doctest::Approx(0.015));
}

TEST_CASE("grid_index") {
    CHECK(grid_index(ParameterSpec("a", 5, 50, 1), 5) == 0);
    CHECK(grid_index(ParameterSpec("e", 50, 1500, 10), 1500) == 145);
    CHECK(grid_index(ParameterSpec("l", 0.9, 0.99, 0.01), 0.95) == 5);
    CHECK_THROWS_AS(grid_index(ParameterSpec("l", 0.9, 0.99, 0.01), 0.955), OffGridError);
    CHECK_THROWS_AS(grid_index(ParameterSpec("l", 0.9, 0.99, 0.01), 1.2), OffGridError);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(ParameterSpec("x", 0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(ParameterSpec("x", 2, 1, 0.1), std::invalid_argument);
    CHECK(ParameterSpec("x", 1, 1, 0.5).count() == 1);
    CHECK_THROWS_AS(ParameterSpace({ParameterSpec("x", 0, 1, 0.1), ParameterSpec("x", 0, 2, 0.1)}),
                    std::invalid_argument);
}

TEST_CASE("property: grid round trip, snap idempotent and bounded") {
    std::mt19937_64 rng(11);
    for (auto alg : {ReconAlgorithm::AsdPocs, ReconAlgorithm::AwPcsd, ReconAlgorithm::Piccs}) {
        const auto space = preset_space(alg);
        for (const auto& s : space.specs()) {
            for (std::size_t k = 0; k < s.count(); ++k) REQUIRE(grid_index(s, s.min + k * s.step) == k);
        }
        for (int trial = 0; trial < 2000; ++trial) {
            std::vector<double> raw;
            for (const auto& s : space.specs()) {
                std::uniform_real_distribution<double> u(s.min - 0.3 * s.range(), s.max + 0.3 * s.range());
                raw.push_back(u(rng));
            }
            const auto p = space.snap(raw);
            REQUIRE(space.on_grid(p));
            const auto v = space.values(p);
            REQUIRE(space.snap(v) == p);
            for (std::size_t d = 0; d < space.dimension(); ++d) {
                REQUIRE(v[d] >= space[d].min - 1e-12);
                REQUIRE(v[d] <= space[d].max + 1e-12);
            }
        }
    }
}

TEST_CASE("algorithm names") {
    CHECK(parse_recon_algorithm("asd_pocs") == ReconAlgorithm::AsdPocs);
    CHECK(parse_recon_algorithm("awpcsd") == ReconAlgorithm::AwPcsd);
    CHECK(parse_recon_algorithm("piccs") == ReconAlgorithm::Piccs);
    CHECK_FALSE(parse_recon_algorithm("fdk"));
    for (auto a : {ReconAlgorithm::AsdPocs, ReconAlgorithm::AwPcsd, ReconAlgorithm::Piccs}) {
        CHECK(parse_recon_algorithm(to_string(a)) == a);
    }
}
