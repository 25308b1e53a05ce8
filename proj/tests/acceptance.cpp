// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "crowtune/config.hpp"
#include "crowtune/eval.hpp"
#include "crowtune/experiment.hpp"
#include "crowtune/io.hpp"
#include "oracles.hpp"

using namespace crowtune;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < limit_s;
    const bool ok = o.pass && in_time;
    if (!ok) ++failures;
    std::printf("criterion %d: %s (%.2f s, limit %.0f s) %s%s\n", id, ok ? "PASS" : "FAIL", secs, limit_s,
                o.detail.c_str(), in_time ? "" : " [over time]");
    std::fflush(stdout);
}

double max_abs_diff(const Array2D& a, const Array2D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double max_abs(const Array2D& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Shared setup of the optimizer criteria.
RunConfig optimizer_setup() {
    RunConfig c;
    c.phantom.kind = PhantomKind::SheppLogan;
    c.phantom.n = 64;
    c.phantom.noise = NoiseModel::gaussian(2.0);
    c.noise_seed = 7;
    c.n_angles = 30;
    c.recon = ReconAlgorithm::AsdPocs;
    c.optimizer.population = 10;
    c.optimizer.iterations = 10;
    c.optimizer.seed = 42;
    c.optimizer.threads = resolve_threads(0);
    return c;
}

std::string serialize(const RunRecord& rec, const ParameterSpace& space) {
    std::ostringstream os;
    write_convergence_csv(os, rec, space);
    write_evaluations_csv(os, rec, space);
    if (rec.weight_map) write_weightmap_csv(os, *rec.weight_map, space);
    return os.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome pareto_oracle() {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> size(1, 200);
    std::uniform_int_distribution<int> coarse(0, 9);
    std::uniform_real_distribution<double> fine(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const auto n = size(rng);
        std::vector<ObjectiveVector> pts(n);
        // coarse values produce ties and duplicates
        for (auto& p : pts) p = t % 2 ? ObjectiveVector{double(coarse(rng)), double(coarse(rng))}
                                     : ObjectiveVector{fine(rng), fine(rng)};
        if (pareto_front(pts) != oracle::brute_pareto(pts)) return {false, "mismatch on instance " + std::to_string(t)};
    }
    return {true, "1000 instances identical"};
}

Outcome spectrum_oracle() {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> dim(2, 16);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t m = dim(rng), n = dim(rng);
        const auto img = oracle::random_image(m, n, rng, 0.0, 1.0);
        const auto ref = oracle::direct_power_spectrum(img);
        worst = std::max(worst, max_abs_diff(power_spectrum(img), ref) / max_abs(ref));
        const double h = hfer(img, 0.25);
        const double hr = oracle::direct_hfer(img, 0.25);
        worst = std::max(worst, std::abs(h - hr) / std::max(hr, 1e-300) * (hr > 0.0));
        if (hr == 0.0 && h != 0.0) return {false, "hfer should be zero"};
    }
    return {worst < 1e-9, fmt("max relative error %.3g", worst)};
}

Outcome adjointness() {
    const Projector a(Geometry::parallel(32, 45));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        Image2D x(32, 32);
        Sinogram y(45, 32);
        for (auto& v : x.data()) v = g(rng);
        for (auto& v : y.data()) v = g(rng);
        const auto ax = a.forward(x);
        const double lhs = dot(ax.data(), y.data());
        const double rhs = dot(x.data(), a.back(y).data());
        worst = std::max(worst, std::abs(lhs - rhs) / (norm2(ax.data()) * norm2(y.data())));
    }
    return {worst < 1e-6, fmt("max relative mismatch %.3g", worst)};
}

Outcome gradients() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(0.1, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto x = oracle::random_image(8, 8, rng);
        const auto fd = oracle::fd_gradient(x, [](const Image2D& y) { return tv_norm(y); });
        worst = std::max(worst, max_abs_diff(tv_gradient(x), fd) / max_abs(fd));
        const double delta = d(rng);
        const auto fa = oracle::fd_gradient(x, [delta](const Image2D& y) { return awtv_norm(y, delta); });
        worst = std::max(worst, max_abs_diff(awtv_gradient(x, delta), fa) / max_abs(fa));
    }
    return {worst < 1e-4, fmt("max relative error %.3g", worst)};
}

Outcome cdlu_contract() {
    ChaosStream chaos;
    const double first = chaos.next();
    if (std::abs(first - std::sin(0.7 * std::numbers::pi)) > 1e-12) return {false, "first chaos value off"};
    for (auto alg : {ReconAlgorithm::AsdPocs, ReconAlgorithm::AwPcsd}) {
        const auto space = preset_space(alg);
        for (std::size_t n : {2, 10, 25, 60}) {
            const auto a = init_cdlu(space, n);
            if (a != init_cdlu(space, n)) return {false, "not deterministic"};
            const auto dlu = init_dlu(space, n);
            for (std::size_t d = 0; d < space.dimension(); ++d) {
                std::vector<std::size_t> got, ref;
                for (std::size_t i = 0; i < n; ++i) {
                    got.push_back(a[i].index[d]);
                    ref.push_back(dlu[i].index[d]);
                }
                std::sort(got.begin(), got.end());
                if (got != ref) return {false, "multiset differs from the diagonal progression"};
            }
        }
    }
    return {true, "deterministic, multisets match, first chaos value exact"};
}

Outcome monotone_and_deterministic() {
    const auto config = optimizer_setup();
    const auto space = config.space();
    auto scenario = std::make_shared<const Scenario>(build_scenario(config));
    const auto eval = make_evaluator(scenario, config);
    const auto a = run(space, eval, config.optimizer, OptimizerAlgorithm::SsaCsa, InitScheme::Cdlu);
    const auto b = run(space, eval, config.optimizer, OptimizerAlgorithm::SsaCsa, InitScheme::Cdlu);
    for (std::size_t i = 1; i < a.iterations.size(); ++i) {
        if (a.iterations[i].best_fitness > a.iterations[i - 1].best_fitness) return {false, "best fitness increased"};
    }
    const std::size_t expected = config.optimizer.population * (config.optimizer.iterations + 1);
    if (a.total_evaluations != expected || a.evaluations.size() != expected) {
        return {false, "evaluation count " + std::to_string(a.total_evaluations)};
    }
    if (serialize(a, space) != serialize(b, space)) return {false, "reruns differ"};
    return {true, fmt("best fitness %.6f -> %.6f, 110 evaluations, reruns identical",
                      a.iterations.front().best_fitness, a.iterations.back().best_fitness)};
}

Outcome relative_performance() {
    auto config = optimizer_setup();
    const auto space = config.space();
    auto scenario = std::make_shared<const Scenario>(build_scenario(config));
    const auto eval = make_evaluator(scenario, config);
    std::vector<double> ssa, csa;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto opt = config.optimizer;
        opt.seed = seed;
        ssa.push_back(run(space, eval, opt, OptimizerAlgorithm::SsaCsa, InitScheme::Cdlu).best_report.fitness);
        csa.push_back(run(space, eval, opt, OptimizerAlgorithm::Csa, InitScheme::Cdlu).best_report.fitness);
    }
    double manual = kPenaltyFitness;
    for (const auto& p : init_random(space, 10, 2024)) {
        try {
            manual = std::min(manual, eval(p).fitness);
        } catch (const DegenerateImageError&) {
        }
    }
    const double ms = median(ssa);
    const double mc = median(csa);
    const bool ok = ms <= mc * 1.01 && ms <= manual && mc <= manual;
    return {ok, fmt("median ssa-csa %.6f, median csa %.6f, best random %.6f", ms, mc, manual)};
}

Outcome piccs_benefit() {
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        RunConfig c;
        c.phantom.kind = PhantomKind::DiskWithInsert;
        c.phantom.n = 64;
        c.phantom.noise = NoiseModel::gaussian(0.5);
        c.noise_seed = seed;
        c.n_angles = 90;
        c.keep_fraction = 0.2;
        const auto s = build_scenario(c);
        ReconParams p;  // shared by both algorithms
        p.rho = 0.5;
        const auto xa = asd_pocs(*s.projector, s.sinogram, p);
        const auto xp = piccs(*s.projector, s.sinogram, s.prior, p);
        const double ra = rms_error(xa, s.truth);
        const double rp = rms_error(xp, s.truth);
        wins += rp < ra;
        detail += fmt("[seed %.0f: piccs %.4f vs asd-pocs %.4f] ", double(seed), rp, ra);
    }
    return {wins == 3, detail + std::to_string(wins) + "/3"};
}

Outcome pearson_sanity() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    double worst_unit = 0.0, worst_affine = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 3 + t;
        std::vector<double> x(n), y(n), neg(n), ax(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = g(rng);
            y[i] = x[i] + g(rng);
        }
        const double s = scale(rng), c = 5.0 * g(rng);
        for (std::size_t i = 0; i < n; ++i) {
            neg[i] = -x[i];
            ax[i] = s * x[i] + c;
        }
        worst_unit = std::max({worst_unit, std::abs(pearson(x, x) - 1.0), std::abs(pearson(x, neg) + 1.0)});
        worst_affine = std::max(worst_affine, std::abs(pearson(ax, y) - pearson(x, y)));
    }
    return {worst_unit < 1e-12 && worst_affine < 1e-10,
            fmt("self/negation error %.3g, affine error %.3g", worst_unit, worst_affine)};
}

Outcome weightmap_chi_square() {
    const ParameterSpace space({ParameterSpec("x", 0.9, 0.99, 0.01)});
    WeightMap map(space, 1.0, 1.05, 1.0);
    map.update(std::vector<Position>{Position{{2}}, Position{{7}}});
    map.update(std::vector<Position>{Position{{7}}});
    const auto w = map.weights(0);
    double total = 0.0;
    for (double v : w) total += v;
    std::vector<double> counts(w.size(), 0.0);
    Rng rng(10);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts[map.sample(rng).index[0]] += 1.0;
    double chi2 = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double e = draws * w[k] / total;
        chi2 += (counts[k] - e) * (counts[k] - e) / e;
    }
    const double crit = oracle::chi2_critical_99(static_cast<int>(w.size()) - 1);
    return {chi2 < crit, fmt("chi2 %.3f < critical %.3f", chi2, crit)};
}

}  // namespace

int main() {
    criterion(1, 5, pareto_oracle);
    criterion(2, 10, spectrum_oracle);
    criterion(3, 30, adjointness);
    criterion(4, 30, gradients);
    criterion(5, 5, cdlu_contract);
    criterion(6, 600, monotone_and_deterministic);
    criterion(7, 3600, relative_performance);
    criterion(8, 300, piccs_benefit);
    criterion(9, 5, pearson_sanity);
    criterion(10, 30, weightmap_chi_square);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
