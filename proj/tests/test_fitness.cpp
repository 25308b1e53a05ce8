#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crowtune/fitness.hpp"
#include "oracles.hpp"

using namespace crowtune;

namespace {

Image2D transpose(const Image2D& a) {
    Image2D t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
    return t;
}

Image2D rotate180(const Image2D& a) {
    Image2D t(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) t(a.rows() - 1 - r, a.cols() - 1 - c) = a(r, c);
    return t;
}

double max_rel(const Array2D& a, const Array2D& b) {
    double peak = 0.0;
    for (double v : b.data()) peak = std::max(peak, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst / peak;
}

}  // namespace

TEST_CASE("snr examples") {
    const Image2D s(2, 2, std::vector<double>{1, 1, 3, 3});
    CHECK(snr(s) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(snr(Volume{s, s}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(snr(Image2D(4, 4, 2.5)), DegenerateImageError);
    CHECK_THROWS_AS(snr(Volume{}), std::invalid_argument);
}

TEST_CASE("power spectrum") {
    const Image2D flat(6, 6, 1.5);
    const auto p = power_spectrum(flat);
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 6; ++c) {
            if (r == 3 && c == 3)
                CHECK(p(r, c) == doctest::Approx(std::pow(36 * 1.5, 2)));
            else
                CHECK(std::abs(p(r, c)) < 1e-18 * std::pow(36 * 1.5, 2) + 1e-20);
        }

    std::mt19937_64 rng(5);
    for (auto [m, n] : {std::pair{16, 16}, std::pair{7, 5}, std::pair{2, 9}, std::pair{12, 3}}) {
        const auto img = oracle::random_image(m, n, rng, -1.0, 2.0);
        const auto ps = power_spectrum(img);
        double parseval = 0.0;
        for (double v : img.data()) parseval += v * v;
        double sum = 0.0;
        for (double v : ps.data()) sum += v;
        CHECK(sum == doctest::Approx(static_cast<double>(m * n) * parseval).epsilon(1e-12));
        CHECK(max_rel(ps, oracle::direct_power_spectrum(img)) < 1e-9);
    }
}

TEST_CASE("hfer") {
    CHECK(hfer(Image2D(8, 8, 3.0), 0.25) == 0.0);
    CHECK(hfer(Image2D(8, 8, 3.0), 0.9) == 0.0);
    CHECK_THROWS_AS(hfer(Image2D(8, 8, 0.0), 0.25), DegenerateImageError);
    CHECK_THROWS_AS(hfer(Image2D(8, 8, 1.0), 1.0), std::invalid_argument);

    // impulse: flat spectrum, so HFER is a bin count
    for (double gamma : {0.1, 0.25, 0.5, 0.75}) {
        Image2D imp(8, 8);
        imp(2, 5) = 1.0;
        const double qmax = std::sqrt(32.0);
        int above = 0;
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                if (std::hypot(r - 4.0, c - 4.0) > gamma * qmax) ++above;
        CHECK(hfer(imp, gamma) == doctest::Approx(above / 64.0).epsilon(1e-12));
    }

    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        const auto img = oracle::random_image(16, 16, rng);
        CHECK(hfer(img, 0.25) == doctest::Approx(oracle::direct_hfer(img, 0.25)).epsilon(1e-9));
    }
}

TEST_CASE("laplacian variance") {
    CHECK(laplacian_variance(Volume{Image2D(5, 5, 2.0)}) == 0.0);
    Image2D ramp(6, 7);
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 7; ++c) ramp(r, c) = 0.5 * r - 1.25 * c + 3;
    CHECK(laplacian_variance(Volume{ramp}) == doctest::Approx(0.0).epsilon(1e-12));
    Image2D board(6, 6);
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 6; ++c) board(r, c) = static_cast<double>((r + c) % 2);
    // interior responses are +4 on zeros and -4 on ones
    CHECK(laplacian_variance(Volume{board}) == doctest::Approx(16.0));
    CHECK_THROWS_AS(laplacian_variance(Volume{Image2D(2, 5, 1.0)}), std::invalid_argument);
}

TEST_CASE("combined fitness") {
    CHECK(combine({1, 0, 0.25}, 2.0, 0.3) == doctest::Approx(0.5));
    CHECK(combine({0, 1, 0.25}, 7.0, 0.25) == doctest::Approx(0.75));
    CHECK(combine({3, 5, 0.25}, 2.0, 0.4) == doctest::Approx(4.5));

    std::mt19937_64 rng(2);
    const auto img = oracle::random_image(12, 12, rng);
    const FitnessConfig a{1.0, 4.0, 0.25};
    const FitnessConfig b{2.0, 8.0, 0.25};
    const auto ra = evaluate(img, a);
    const auto rb = evaluate(img, b);
    CHECK(rb.fitness == doctest::Approx(2.0 * ra.fitness).epsilon(1e-14));
    CHECK(ra.objectives.inv_snr == doctest::Approx(1.0 / ra.snr));
    CHECK(ra.objectives.hfer_deficit == doctest::Approx(1.0 - ra.hfer));
    CHECK(ra.fitness == doctest::Approx(a.eta / ra.snr + a.xi * (1.0 - ra.hfer)));
    REQUIRE(ra.laplacian_var);
    CHECK_FALSE(ra.psnr);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(FitnessConfig{}.validate());
    CHECK_THROWS_AS((FitnessConfig{-1, 1, 0.25}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FitnessConfig{0, 0, 0.25}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FitnessConfig{1, 1, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FitnessConfig{1, 1, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("property: metric invariances and bounds") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 50; ++t) {
        const auto img = oracle::random_image(9 + t % 5, 9 + t % 7, rng, 0.1, 3.0);
        const double h = hfer(img, 0.25);
        CHECK(h >= 0.0);
        CHECK(h <= 1.0);
        double prev = 1.0;
        for (double g : {0.05, 0.15, 0.3, 0.5, 0.7, 0.95}) {
            const double v = hfer(img, g);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        const auto tr = transpose(img);
        const auto rot = rotate180(img);
        CHECK(hfer(tr, 0.25) == doctest::Approx(h).epsilon(1e-10));
        CHECK(hfer(rot, 0.25) == doctest::Approx(h).epsilon(1e-10));
        CHECK(snr(tr) == doctest::Approx(snr(img)).epsilon(1e-12));
        CHECK(snr(rot) == doctest::Approx(snr(img)).epsilon(1e-12));
        const double lv = laplacian_variance(Volume{img});
        CHECK(laplacian_variance(Volume{tr}) == doctest::Approx(lv).epsilon(1e-10));
        CHECK(laplacian_variance(Volume{rot}) == doctest::Approx(lv).epsilon(1e-10));
        Image2D scaled = img;
        for (auto& v : scaled.data()) v *= 3.7;
        CHECK(snr(scaled) == doctest::Approx(snr(img)).epsilon(1e-12));
        CHECK(hfer(scaled, 0.25) == doctest::Approx(h).epsilon(1e-12));
    }
}

TEST_CASE("radial frequency") {
    CHECK(radial_frequency(4, 4, 8, 8) == 0.0);
    CHECK(radial_frequency(0, 0, 8, 8) == doctest::Approx(std::sqrt(32.0)));
    CHECK(max_radial_frequency(8, 8) == doctest::Approx(std::sqrt(32.0)));
    CHECK(max_radial_frequency(7, 5) == doctest::Approx(std::sqrt(9.0 + 4.0)));
}
