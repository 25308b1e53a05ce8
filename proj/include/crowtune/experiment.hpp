#pragma once

#include <memory>
#include <optional>

#include "crowtune/config.hpp"
#include "crowtune/fitness.hpp"
#include "crowtune/image.hpp"
#include "crowtune/optimizer.hpp"
#include "crowtune/recon.hpp"

namespace crowtune {

/// Everything a reconstruction needs: ground truth, measured data and the
/// (possibly view-subsampled) system matrix.
struct Scenario {
    Image2D truth;
    /// Prior image for PICCS: the insert-free variant of disk_with_insert,
    /// otherwise the ground truth itself.
    Image2D prior;
    Sinogram sinogram;
    std::shared_ptr<const Projector> projector;
    double data_range = 1.0;
};

Scenario build_scenario(const RunConfig& config);

struct ReconOutcome {
    Image2D image;
    FitnessReport report;
};

/// Reconstructs with `params` and scores the result (fitness plus PSNR
/// against the ground truth). Throws DegenerateImageError on a flat or
/// non-finite image.
ReconOutcome reconstruct_and_score(const Scenario& scenario, const RunConfig& config, const ReconParams& params);

/// Evaluator for the optimizer: degenerate reconstructions are left to the
/// optimizer's penalty handling.
Evaluator make_evaluator(std::shared_ptr<const Scenario> scenario, const RunConfig& config);

/// Base parameters: defaults with rho taken from the config.
ReconParams base_params(const RunConfig& config);

/// Worker count: config value when non-zero, else CROWTUNE_THREADS, else
/// hardware concurrency; CROWTUNE_THREADS also caps an explicit value.
std::size_t resolve_threads(std::size_t configured);

}  // namespace crowtune
