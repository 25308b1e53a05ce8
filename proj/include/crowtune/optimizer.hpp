#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "crowtune/fitness.hpp"
#include "crowtune/init.hpp"
#include "crowtune/param_space.hpp"

namespace crowtune {

using Rng = std::mt19937_64;

enum class OptimizerAlgorithm { Csa, SsaCsa };

std::string_view to_string(OptimizerAlgorithm algorithm) noexcept;
std::optional<OptimizerAlgorithm> parse_optimizer_algorithm(std::string_view name) noexcept;

struct OptimizerConfig {
    std::size_t population = 25;
    std::size_t iterations = 30;
    double flight_length = 2.0;
    double ap0 = 0.3;
    /// Unset means (0.9 / ap0)^(1/iterations), which brings AP to 0.9 at the
    /// last iteration.
    std::optional<double> ap_inc;
    double kappa0 = 0.4;
    double omega_inc = 1.05;
    double k0 = 1.0;
    double weight_floor = 1.0;
    /// Half-width of the weight-map neighbourhood as a fraction of each
    /// parameter's range.
    double neighborhood = 0.10;
    /// Fixed awareness probability of the original CSA.
    double csa_awareness = 0.1;
    std::uint64_t seed = 0;
    /// Parallel evaluations; 0 selects the hardware concurrency.
    std::size_t threads = 0;

    double effective_ap_inc() const noexcept;
    double kappa_red() const noexcept { return 1.0 - 1.0 / static_cast<double>(iterations); }
    double ap_at(std::size_t t) const noexcept;
    double kappa_at(std::size_t t) const noexcept;
    void validate() const;
};

/// Penalty applied when the evaluator reports a degenerate image.
inline constexpr double kPenaltyFitness = 1e6;
FitnessReport penalty_report() noexcept;

struct Crow {
    Position position;
    Position memory;
    double memory_fitness = 0.0;
    ObjectiveVector memory_objectives;
};

struct SuperiorSet {
    std::vector<std::size_t> members;
    std::size_t size() const noexcept { return members.size(); }
};

/// Indices of all non-dominated vectors (minimization); duplicates are kept.
std::vector<std::size_t> pareto_front(std::span<const ObjectiveVector> objectives);

/// max(1, ceil(n * kappa)), tolerant to rounding noise in n * kappa.
std::size_t superior_size(std::size_t n, double kappa) noexcept;

/// Pareto front of the memories, truncated or filled by ascending scalar
/// fitness (ties by lower index) to superior_size(crows.size(), kappa).
SuperiorSet select_superior_set(std::span<const Crow> crows, double kappa);

/// Original crow move X + r * L * (M - X), snapped to the grid.
Position csa_local_step(const ParameterSpace& space, const Position& x, const Position& memory,
                        double flight_length, double r);
Position csa_local_step(const ParameterSpace& space, const Position& x, const Position& memory,
                        double flight_length, Rng& rng);

/// Same move with the random factor replaced by the next chaos value.
Position ssa_local_step(const ParameterSpace& space, const Position& x, const Position& leader,
                        double flight_length, ChaosStream& chaos);

/// Per-parameter sampling weights over each grid. Superior memories deposit
/// K on their own grid point and K/2 on points within the neighbourhood band;
/// K grows geometrically with every update.
class WeightMap {
public:
    WeightMap() = default;
    WeightMap(const ParameterSpace& space, double k0, double omega_inc, double floor,
              double neighborhood = 0.10);

    void update(std::span<const Position> members);
    Position sample(Rng& rng) const;

    std::size_t dimension() const noexcept { return weights_.size(); }
    std::span<const double> weights(std::size_t d) const { return weights_.at(d); }
    double k() const noexcept { return k_; }
    std::size_t updates() const noexcept { return updates_; }
    std::size_t band(std::size_t d) const { return band_.at(d); }

    /// Restores a map from exported weights.
    static WeightMap from_weights(std::vector<std::vector<double>> weights);

private:
    std::vector<std::vector<double>> weights_;
    std::vector<std::size_t> band_;  // neighbourhood half-width in grid steps
    double k_ = 1.0;
    double omega_inc_ = 1.05;
    std::size_t updates_ = 0;
};

/// Lower-tail quantile with linear interpolation between order statistics.
double quantile(std::span<const double> values, double p);

enum class Move { Local, Global };

/// Local iff fitnesses[i] is strictly below the ap-quantile of fitnesses.
Move balance_decide(std::span<const double> fitnesses, std::size_t i, double ap);

using Evaluator = std::function<FitnessReport(const Position&)>;

struct IterationStats {
    std::size_t iteration = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::size_t superior_size = 0;
    std::size_t explorations = 0;
    std::size_t memory_updates = 0;
};

struct EvaluationRecord {
    std::size_t iteration = 0;
    std::size_t crow = 0;
    Position position;
    FitnessReport report;
    bool penalized = false;
};

struct RunRecord {
    OptimizerAlgorithm algorithm = OptimizerAlgorithm::SsaCsa;
    InitScheme init = InitScheme::Cdlu;
    OptimizerConfig config;
    std::vector<IterationStats> iterations;
    std::vector<EvaluationRecord> evaluations;
    Position best_position;
    FitnessReport best_report;
    std::optional<WeightMap> weight_map;
    std::size_t total_evaluations = 0;
};

/// Runs CSA or SSA-CSA for config.iterations iterations after evaluating the
/// initial population; performs exactly population * (iterations + 1)
/// evaluations. Evaluations within an iteration may run concurrently, so the
/// evaluator must be thread-safe.
RunRecord run(const ParameterSpace& space, const Evaluator& evaluator, const OptimizerConfig& config,
              OptimizerAlgorithm algorithm, InitScheme init);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace crowtune
