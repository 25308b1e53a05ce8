#include "crowtune/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace crowtune {

std::string_view to_string(OptimizerAlgorithm algorithm) noexcept {
    return algorithm == OptimizerAlgorithm::Csa ? "csa" : "ssa-csa";
}

std::optional<OptimizerAlgorithm> parse_optimizer_algorithm(std::string_view name) noexcept {
    if (name == "csa" || name == "CSA") return OptimizerAlgorithm::Csa;
    if (name == "ssa-csa" || name == "ssa_csa" || name == "SSA-CSA") return OptimizerAlgorithm::SsaCsa;
    return std::nullopt;
}

double OptimizerConfig::effective_ap_inc() const noexcept {
    if (ap_inc) return *ap_inc;
    return std::pow(0.9 / ap0, 1.0 / static_cast<double>(iterations));
}

double OptimizerConfig::ap_at(std::size_t t) const noexcept {
    return ap0 * std::pow(effective_ap_inc(), static_cast<double>(t));
}

double OptimizerConfig::kappa_at(std::size_t t) const noexcept {
    // T = 1 gives kappa_red = 0; keep kappa positive so the set shrinks to one leader
    return std::max(kappa0 * std::pow(kappa_red(), static_cast<double>(t)), std::numeric_limits<double>::min());
}

void OptimizerConfig::validate() const {
    if (population < 2) throw std::invalid_argument("population must be at least 2");
    if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
    if (!(flight_length > 0.0)) throw std::invalid_argument("flight_length must be positive");
    if (!(ap0 > 0.0 && ap0 < 1.0)) throw std::invalid_argument("ap0 must lie in (0, 1)");
    if (!(effective_ap_inc() >= 1.0)) throw std::invalid_argument("ap_inc must be >= 1");
    if (ap_at(iterations) > 1.0 + 1e-12) {
        throw std::invalid_argument("ap0 * ap_inc^iterations exceeds 1");
    }
    if (!(kappa0 > 0.0 && kappa0 <= 1.0)) throw std::invalid_argument("kappa0 must lie in (0, 1]");
    if (!(omega_inc > 1.0)) throw std::invalid_argument("omega_inc must be > 1");
    if (!(k0 > 0.0)) throw std::invalid_argument("k0 must be positive");
    if (!(weight_floor > 0.0)) throw std::invalid_argument("weight_floor must be positive");
    if (!(neighborhood >= 0.0)) throw std::invalid_argument("neighborhood must be >= 0");
    if (!(csa_awareness >= 0.0 && csa_awareness <= 1.0)) {
        throw std::invalid_argument("csa_awareness must lie in [0, 1]");
    }
}

FitnessReport penalty_report() noexcept {
    FitnessReport r;
    r.snr = 0.0;
    r.hfer = 0.0;
    r.fitness = kPenaltyFitness;
    r.objectives = {kPenaltyFitness, 1.0};
    return r;
}

// ---------------------------------------------------------------------------
// Superior set

std::vector<std::size_t> pareto_front(std::span<const ObjectiveVector> obj) {
    // Lexicographic sweep: a vector is dominated either by one with a smaller
    // first objective and no larger second, or by one with an equal first
    // objective and a strictly smaller second.
    std::vector<std::size_t> order(obj.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (obj[a].inv_snr != obj[b].inv_snr) return obj[a].inv_snr < obj[b].inv_snr;
        if (obj[a].hfer_deficit != obj[b].hfer_deficit) return obj[a].hfer_deficit < obj[b].hfer_deficit;
        return a < b;
    });

    std::vector<std::size_t> front;
    double best_before = std::numeric_limits<double>::infinity();
    std::size_t g = 0;
    while (g < order.size()) {
        std::size_t end = g;
        while (end < order.size() && obj[order[end]].inv_snr == obj[order[g]].inv_snr) ++end;
        const double group_min = obj[order[g]].hfer_deficit;
        for (std::size_t k = g; k < end; ++k) {
            const double v = obj[order[k]].hfer_deficit;
            if (v == group_min && v < best_before) front.push_back(order[k]);
        }
        best_before = std::min(best_before, group_min);
        g = end;
    }
    std::sort(front.begin(), front.end());
    return front;
}

std::size_t superior_size(std::size_t n, double kappa) noexcept {
    const double raw = static_cast<double>(n) * kappa;
    const auto s = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::clamp<std::size_t>(s, 1, std::max<std::size_t>(n, 1));
}

SuperiorSet select_superior_set(std::span<const Crow> crows, double kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
    const std::size_t target = superior_size(crows.size(), kappa);

    std::vector<ObjectiveVector> obj(crows.size());
    for (std::size_t i = 0; i < crows.size(); ++i) obj[i] = crows[i].memory_objectives;
    auto front = pareto_front(obj);

    auto by_fitness = [&](std::size_t a, std::size_t b) {
        if (crows[a].memory_fitness != crows[b].memory_fitness) {
            return crows[a].memory_fitness < crows[b].memory_fitness;
        }
        return a < b;
    };

    SuperiorSet set;
    if (front.size() >= target) {
        std::sort(front.begin(), front.end(), by_fitness);
        front.resize(target);
        set.members = std::move(front);
        return set;
    }

    std::vector<bool> in_front(crows.size(), false);
    for (auto i : front) in_front[i] = true;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < crows.size(); ++i) {
        if (!in_front[i]) rest.push_back(i);
    }
    std::sort(rest.begin(), rest.end(), by_fitness);
    set.members = std::move(front);
    for (std::size_t k = 0; set.members.size() < target && k < rest.size(); ++k) {
        set.members.push_back(rest[k]);
    }
    return set;
}

// ---------------------------------------------------------------------------
// Local moves

Position csa_local_step(const ParameterSpace& space, const Position& x, const Position& memory,
                        double flight_length, double r) {
    const auto xv = space.values(x);
    const auto mv = space.values(memory);
    std::vector<double> raw(xv.size());
    for (std::size_t d = 0; d < raw.size(); ++d) raw[d] = xv[d] + r * flight_length * (mv[d] - xv[d]);
    return space.snap(raw);
}

Position csa_local_step(const ParameterSpace& space, const Position& x, const Position& memory,
                        double flight_length, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return csa_local_step(space, x, memory, flight_length, u(rng));
}

Position ssa_local_step(const ParameterSpace& space, const Position& x, const Position& leader,
                        double flight_length, ChaosStream& chaos) {
    return csa_local_step(space, x, leader, flight_length, chaos.next());
}

// ---------------------------------------------------------------------------
// Weight map

WeightMap::WeightMap(const ParameterSpace& space, double k0, double omega_inc, double floor,
                     double neighborhood)
    : k_(k0), omega_inc_(omega_inc) {
    if (!(floor > 0.0)) throw std::invalid_argument("weight floor must be positive");
    weights_.reserve(space.dimension());
    band_.reserve(space.dimension());
    for (const auto& spec : space.specs()) {
        weights_.emplace_back(spec.count(), floor);
        band_.push_back(static_cast<std::size_t>(std::floor(neighborhood * spec.range() / spec.step + 1e-9)));
    }
}

WeightMap WeightMap::from_weights(std::vector<std::vector<double>> weights) {
    WeightMap m;
    m.band_.assign(weights.size(), 0);
    m.weights_ = std::move(weights);
    return m;
}

void WeightMap::update(std::span<const Position> members) {
    k_ *= omega_inc_;
    ++updates_;
    const double half = 0.5 * k_;
    for (const auto& m : members) {
        if (m.size() != weights_.size()) throw DimensionError("weight map: dimension mismatch");
        for (std::size_t d = 0; d < weights_.size(); ++d) {
            auto& w = weights_[d];
            const std::size_t k = m.index[d];
            if (k >= w.size()) throw OffGridError("weight map: index outside grid");
            w[k] += k_;
            const std::size_t lo = k >= band_[d] ? k - band_[d] : 0;
            const std::size_t hi = std::min(w.size() - 1, k + band_[d]);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j != k) w[j] += half;
            }
        }
    }
}

Position WeightMap::sample(Rng& rng) const {
    Position pos;
    pos.index.resize(weights_.size());
    std::vector<double> cumulative;
    for (std::size_t d = 0; d < weights_.size(); ++d) {
        const auto& w = weights_[d];
        cumulative.resize(w.size());
        std::partial_sum(w.begin(), w.end(), cumulative.begin());
        std::uniform_real_distribution<double> u(0.0, cumulative.back());
        const double x = u(rng);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        pos.index[d] = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), w.size() - 1);
    }
    return pos;
}

// ---------------------------------------------------------------------------
// Balance

double quantile(std::span<const double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty set");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Move balance_decide(std::span<const double> fitnesses, std::size_t i, double ap) {
    if (!(ap > 0.0 && ap <= 1.0)) throw std::invalid_argument("AP must lie in (0, 1]");
    const double threshold = quantile(fitnesses, ap);
    return fitnesses[i] < threshold ? Move::Local : Move::Global;
}

// ---------------------------------------------------------------------------
// Driver

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

namespace {

struct Outcome {
    FitnessReport report;
    bool penalized = false;
};

Outcome evaluate_safely(const Evaluator& evaluator, const Position& p) {
    try {
        auto rep = evaluator(p);
        if (!std::isfinite(rep.fitness)) return {penalty_report(), true};
        return {std::move(rep), false};
    } catch (const DegenerateImageError&) {
        return {penalty_report(), true};
    }
}

std::vector<Outcome> evaluate_all(const Evaluator& evaluator, const std::vector<Position>& positions,
                                  std::size_t threads) {
    std::vector<Outcome> out(positions.size());
    parallel_for(positions.size(), threads, [&](std::size_t i) { out[i] = evaluate_safely(evaluator, positions[i]); });
    return out;
}

Position uniform_position(const ParameterSpace& space, Rng& rng) {
    Position p;
    p.index.resize(space.dimension());
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        std::uniform_int_distribution<std::size_t> pick(0, space[d].count() - 1);
        p.index[d] = pick(rng);
    }
    return p;
}

}  // namespace

RunRecord run(const ParameterSpace& space, const Evaluator& evaluator, const OptimizerConfig& config,
              OptimizerAlgorithm algorithm, InitScheme init) {
    config.validate();
    const std::size_t n = config.population;
    const bool ssa = algorithm == OptimizerAlgorithm::SsaCsa;

    RunRecord rec;
    rec.algorithm = algorithm;
    rec.init = init;
    rec.config = config;

    // Independent of the stream consumed by init_random / init_lhs.
    Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + 0xC0FFEEULL);
    ChaosStream chaos;
    std::optional<WeightMap> weights;
    if (ssa) weights.emplace(space, config.k0, config.omega_inc, config.weight_floor, config.neighborhood);

    std::vector<Position> positions = initialize(init, space, n, config.seed);
    std::vector<Crow> crows(n);
    std::vector<FitnessReport> memory_reports(n);

    auto log_evaluations = [&](std::size_t t, const std::vector<Outcome>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            rec.evaluations.push_back({t, i, positions[i], out[i].report, out[i].penalized});
        }
        rec.total_evaluations += n;
    };

    auto record_stats = [&](std::size_t t, std::size_t superior, std::size_t explorations, std::size_t updates) {
        IterationStats s;
        s.iteration = t;
        s.best_fitness = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& c : crows) {
            s.best_fitness = std::min(s.best_fitness, c.memory_fitness);
            sum += c.memory_fitness;
        }
        s.mean_fitness = sum / static_cast<double>(n);
        s.superior_size = superior;
        s.explorations = explorations;
        s.memory_updates = updates;
        rec.iterations.push_back(s);
    };

    {
        const auto out = evaluate_all(evaluator, positions, config.threads);
        for (std::size_t i = 0; i < n; ++i) {
            crows[i].position = positions[i];
            crows[i].memory = positions[i];
            crows[i].memory_fitness = out[i].report.fitness;
            crows[i].memory_objectives = out[i].report.objectives;
            memory_reports[i] = out[i].report;
        }
        log_evaluations(0, out);
        record_stats(0, 0, 0, 0);
    }

    std::vector<double> memory_fitness(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> any_crow(0, n - 1);

    for (std::size_t t = 1; t <= config.iterations; ++t) {
        for (std::size_t i = 0; i < n; ++i) memory_fitness[i] = crows[i].memory_fitness;
        std::size_t explorations = 0;
        std::size_t superior_count = 0;

        if (ssa) {
            const double ap = config.ap_at(t);
            const auto superior = select_superior_set(crows, config.kappa_at(t));
            superior_count = superior.size();
            std::vector<Position> leaders;
            leaders.reserve(superior.size());
            for (auto j : superior.members) leaders.push_back(crows[j].memory);
            weights->update(leaders);

            const double threshold = quantile(memory_fitness, ap);
            std::uniform_int_distribution<std::size_t> pick(0, leaders.size() - 1);
            for (std::size_t i = 0; i < n; ++i) {
                if (memory_fitness[i] < threshold) {
                    const auto& leader = leaders[pick(rng)];
                    positions[i] = ssa_local_step(space, crows[i].position, leader, config.flight_length, chaos);
                } else {
                    positions[i] = weights->sample(rng);
                    ++explorations;
                }
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = any_crow(rng);
                if (unit(rng) >= config.csa_awareness) {
                    positions[i] = csa_local_step(space, crows[i].position, crows[j].memory,
                                                  config.flight_length, rng);
                } else {
                    positions[i] = uniform_position(space, rng);
                    ++explorations;
                }
            }
        }

        const auto out = evaluate_all(evaluator, positions, config.threads);
        std::size_t updates = 0;
        for (std::size_t i = 0; i < n; ++i) {
            crows[i].position = positions[i];
            if (out[i].report.fitness < crows[i].memory_fitness) {
                crows[i].memory = positions[i];
                crows[i].memory_fitness = out[i].report.fitness;
                crows[i].memory_objectives = out[i].report.objectives;
                memory_reports[i] = out[i].report;
                ++updates;
            }
        }
        log_evaluations(t, out);
        record_stats(t, superior_count, explorations, updates);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (crows[i].memory_fitness < crows[best].memory_fitness) best = i;
    }
    rec.best_position = crows[best].memory;
    rec.best_report = memory_reports[best];
    rec.weight_map = std::move(weights);
    return rec;
}

}  // namespace crowtune
