#include "crowtune/experiment.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#include "crowtune/errors.hpp"
#include "crowtune/eval.hpp"
#include "crowtune/phantoms.hpp"

namespace crowtune {

Scenario build_scenario(const RunConfig& config) {
    Scenario s;
    s.truth = make_phantom(config.phantom);
    if (config.phantom.kind == PhantomKind::DiskWithInsert) {
        PhantomSpec bare = config.phantom;
        bare.insert = false;
        s.prior = make_phantom(bare);
    } else {
        s.prior = s.truth;
    }
    const auto full = Geometry::parallel(config.phantom.n, config.n_angles, config.n_detectors);
    auto sino = simulate_sinogram(s.truth, full, config.phantom.noise, config.noise_seed);
    if (config.keep_fraction < 1.0) {
        auto [sub, geom] = subsample_views(sino, full, config.keep_fraction);
        s.sinogram = std::move(sub);
        s.projector = std::make_shared<const Projector>(geom);
    } else {
        s.sinogram = std::move(sino);
        s.projector = std::make_shared<const Projector>(full);
    }
    const double range = max_value(s.truth.data()) - min_value(s.truth.data());
    s.data_range = range > 0.0 ? range : 1.0;
    return s;
}

ReconParams base_params(const RunConfig& config) {
    ReconParams p;
    p.rho = config.rho;
    return p;
}

ReconOutcome reconstruct_and_score(const Scenario& scenario, const RunConfig& config, const ReconParams& params) {
    auto image = reconstruct(config.recon, *scenario.projector, scenario.sinogram, params, &scenario.prior);
    auto report = evaluate(image, config.fitness);
    if (!std::isfinite(report.fitness)) throw DegenerateImageError("fitness is not finite");
    report.psnr = psnr(image, scenario.truth, scenario.data_range);
    return {std::move(image), report};
}

Evaluator make_evaluator(std::shared_ptr<const Scenario> scenario, const RunConfig& config) {
    const auto space = config.space();
    const auto base = base_params(config);
    return [scenario = std::move(scenario), config, space, base](const Position& pos) {
        const auto params = ReconParams::from_position(space, pos, base);
        return reconstruct_and_score(*scenario, config, params).report;
    };
}

std::size_t resolve_threads(std::size_t configured) {
    std::size_t cap = 0;
    if (const char* env = std::getenv("CROWTUNE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) cap = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    std::size_t n = configured;
    if (n == 0) n = cap != 0 ? cap : std::max(1u, std::thread::hardware_concurrency());
    if (cap != 0) n = std::min(n, cap);
    return n;
}

}  // namespace crowtune
