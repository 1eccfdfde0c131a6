#pragma once

#include "pdtune/pareto.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pdtune {

/// Swarm parameters. The inertia weight may be negative; the damping ratio
/// shrinks it geometrically once per iteration.
struct PsoConfig {
    std::size_t population = 50;
    std::size_t iterations = 30;
    double inertia = 0.5;
    double inertia_damping = 0.99;
    double cognitive = 2.0; // c1
    double social = 2.0;    // c2
    std::optional<std::vector<double>> v_max;

    void validate() const {
        if (population < 2) {
            throw std::invalid_argument("PsoConfig: population must be >= 2");
        }
        if (iterations < 1) {
            throw std::invalid_argument("PsoConfig: iterations must be >= 1");
        }
        if (!(inertia_damping > 0.0) || inertia_damping > 1.0) {
            throw std::invalid_argument("PsoConfig: inertia_damping must be in (0, 1]");
        }
    }
};

/// Adaptive-grid archive parameters: grid resolution, range inflation,
/// leader/deletion selection pressure, leader mutation rate and capacity.
struct ArchiveConfig {
    int grids_per_dim = 7;        // G_s
    double inflation = 0.1;       // alpha
    double leader_pressure = 2.0; // beta
    double deletion_pressure = 2.0; // gamma
    double mutation_rate = 0.1;   // mu
    std::size_t capacity = 100;

    void validate() const {
        if (grids_per_dim < 1) {
            throw std::invalid_argument("ArchiveConfig: grids_per_dim must be >= 1");
        }
        if (!(inflation >= 0.0)) {
            throw std::invalid_argument("ArchiveConfig: inflation must be >= 0");
        }
        if (!(leader_pressure > 0.0) || !(deletion_pressure > 0.0)) {
            throw std::invalid_argument("ArchiveConfig: selection pressures must be > 0");
        }
        if (!(mutation_rate >= 0.0) || mutation_rate > 1.0) {
            throw std::invalid_argument("ArchiveConfig: mutation_rate must be in [0, 1]");
        }
        if (capacity < 1) {
            throw std::invalid_argument("ArchiveConfig: capacity must be >= 1");
        }
    }
};

/// Capacity-bounded Pareto archive with an adaptive hypergrid over objective
/// space. Sparse cells are preferred when drawing leaders, crowded cells when
/// deleting overflow.
class GridArchive {
public:
    explicit GridArchive(ArchiveConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    const ParetoFront& front() const { return front_; }

    bool insert(Individual candidate) { return front_.insert(std::move(candidate)); }

    /// Deletes members via the crowded-cell roulette until within capacity.
    template <class Rng>
    void prune(Rng&& rng) {
        while (front_.size() > cfg_.capacity) {
            const auto cells = occupancy();
            const std::size_t victim_cell = roulette(cells, cfg_.deletion_pressure, rng);
            const auto& bucket = cells[victim_cell].second;
            front_.remove_at(bucket[rng.uniform_index(bucket.size())]);
        }
    }

    /// Draws a leader, favouring members in sparsely populated cells.
    template <class Rng>
    const Individual& select_leader(Rng&& rng) const {
        if (front_.empty()) {
            throw std::logic_error("GridArchive::select_leader: empty archive");
        }
        const auto cells = occupancy();
        const std::size_t cell = roulette(cells, -cfg_.leader_pressure, rng);
        const auto& bucket = cells[cell].second;
        return front_.members()[bucket[rng.uniform_index(bucket.size())]];
    }

private:
    using CellBuckets = std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>>;

    /// Members grouped by grid cell, keyed in deterministic cell-id order.
    CellBuckets occupancy() const {
        const auto& members = front_.members();
        const std::size_t k = members.front().objectives.size();
        std::vector<double> lo(k, std::numeric_limits<double>::infinity());
        std::vector<double> hi(k, -std::numeric_limits<double>::infinity());
        for (const auto& m : members) {
            for (std::size_t i = 0; i < k; ++i) {
                lo[i] = std::min(lo[i], m.objectives[i]);
                hi[i] = std::max(hi[i], m.objectives[i]);
            }
        }
        for (std::size_t i = 0; i < k; ++i) {
            const double pad = cfg_.inflation * (hi[i] - lo[i]);
            lo[i] -= pad;
            hi[i] += pad;
        }

        std::map<std::uint64_t, std::vector<std::size_t>> buckets;
        const auto g = static_cast<std::uint64_t>(cfg_.grids_per_dim);
        for (std::size_t idx = 0; idx < members.size(); ++idx) {
            std::uint64_t cell = 0;
            for (std::size_t i = 0; i < k; ++i) {
                std::uint64_t c = 0;
                if (hi[i] > lo[i]) {
                    const double t = (members[idx].objectives[i] - lo[i]) / (hi[i] - lo[i]);
                    c = std::min<std::uint64_t>(g - 1, static_cast<std::uint64_t>(
                                                           t * static_cast<double>(g)));
                }
                cell = cell * g + c;
            }
            buckets[cell].push_back(idx);
        }
        return CellBuckets(buckets.begin(), buckets.end());
    }

    /// Cell roulette with weight exp(pressure * count), normalized by the
    /// largest exponent so extreme pressures cannot overflow.
    template <class Rng>
    static std::size_t roulette(const CellBuckets& cells, double pressure, Rng& rng) {
        double max_exp = -std::numeric_limits<double>::infinity();
        for (const auto& [cell, bucket] : cells) {
            max_exp = std::max(max_exp, pressure * static_cast<double>(bucket.size()));
        }
        std::vector<double> weights(cells.size());
        double total = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            weights[i] = std::exp(pressure * static_cast<double>(cells[i].second.size()) -
                                  max_exp);
            total += weights[i];
        }
        double u = rng.uniform() * total;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            u -= weights[i];
            if (u <= 0.0) {
                return i;
            }
        }
        return cells.size() - 1;
    }

    ArchiveConfig cfg_;
    ParetoFront front_;
};

/// Aggregation-mode swarm state: positions, velocities, personal bests, the
/// swarm-wide best, and the current (damped) inertia weight.
struct PsoSwarm {
    Population members;
    std::vector<Genes> velocities;
    Population personal_best;
    Individual global_best;
    double inertia = 0.5;
};

/// One velocity/position update of every particle. Each particle-dimension
/// draws two fresh uniforms (cognitive then social). Positions are clamped
/// into bounds and marked for re-evaluation; the inertia weight is damped
/// once at the end.
template <class StreamFactory>
void pso_step(PsoSwarm& swarm, const PsoConfig& cfg, const Bounds& bounds,
              StreamFactory&& streams) {
    const std::size_t dim = bounds.dim();
    for (std::size_t i = 0; i < swarm.members.size(); ++i) {
        auto rng = streams(i);
        Genes& x = swarm.members[i].genes;
        Genes& v = swarm.velocities[i];
        for (std::size_t d = 0; d < dim; ++d) {
            const double r1 = rng.uniform();
            const double r2 = rng.uniform();
            v[d] = swarm.inertia * v[d] +
                   cfg.cognitive * r1 * (swarm.personal_best[i].genes[d] - x[d]) +
                   cfg.social * r2 * (swarm.global_best.genes[d] - x[d]);
            if (cfg.v_max) {
                v[d] = std::clamp(v[d], -(*cfg.v_max)[d], (*cfg.v_max)[d]);
            }
            x[d] += v[d];
        }
        x = clamp(std::move(x), bounds);
        swarm.members[i].objectives.clear();
        swarm.members[i].scalar_cost = std::numeric_limits<double>::quiet_NaN();
    }
    swarm.inertia *= cfg.inertia_damping;
}

struct ScalarRunResult {
    Individual best;
    std::vector<double> history; // best aggregated cost after each evaluation round
};

using MooObserver = std::function<void(std::size_t iteration, const ParetoFront&)>;

namespace detail {

// Stream-id layout shared by all optimizers: stream 0 initializes the
// population, update round t >= 1 gives individual i the stream
// t * population + i, and per-iteration housekeeping draws (archive pruning)
// use a tagged id so they can never collide with individual streams.
inline constexpr std::uint64_t kAuxStreamTag = 0x8000000000000000ull;

inline RngStream aux_stream(std::uint64_t seed, std::size_t iteration) {
    return RngStream(seed, kAuxStreamTag + iteration);
}

inline void check_pso_inputs(const Problem& problem, const PsoConfig& cfg) {
    cfg.validate();
    problem.bounds.validate();
    if (cfg.v_max && cfg.v_max->size() != problem.bounds.dim()) {
        throw std::invalid_argument("PsoConfig: v_max dimension mismatch");
    }
}

inline Weights uniform_weights(std::size_t k) {
    return Weights{std::vector<double>(k, 1.0)};
}

} // namespace detail

/// Aggregation PSO: global-best topology, geometric inertia damping, history
/// of the best cost after every evaluation round (the first entry is the
/// evaluated initial population).
inline ScalarRunResult run_pso(const Problem& problem, const PsoConfig& cfg,
                               const Weights& weights, std::uint64_t seed,
                               unsigned workers = 1) {
    detail::check_pso_inputs(problem, cfg);
    weights.validate();

    RngStream init_rng(seed, 0);
    PsoSwarm swarm;
    swarm.members = init_population(cfg.population, problem.bounds, init_rng,
                                    problem.seed_genes);
    evaluate_population(swarm.members, problem, weights, workers);
    swarm.velocities.assign(cfg.population, Genes(problem.bounds.dim(), 0.0));
    swarm.personal_best = swarm.members;
    swarm.inertia = cfg.inertia;
    swarm.global_best = swarm.personal_best[0];
    for (const Individual& pb : swarm.personal_best) {
        if (pb.scalar_cost < swarm.global_best.scalar_cost) {
            swarm.global_best = pb;
        }
    }

    ScalarRunResult result;
    result.history.push_back(swarm.global_best.scalar_cost);
    for (std::size_t t = 1; t < cfg.iterations; ++t) {
        pso_step(swarm, cfg, problem.bounds, [&](std::size_t i) {
            return RngStream(seed, t * cfg.population + i);
        });
        evaluate_population(swarm.members, problem, weights, workers);
        for (std::size_t i = 0; i < swarm.members.size(); ++i) {
            if (swarm.members[i].scalar_cost < swarm.personal_best[i].scalar_cost) {
                swarm.personal_best[i] = swarm.members[i];
            }
            if (swarm.personal_best[i].scalar_cost < swarm.global_best.scalar_cost) {
                swarm.global_best = swarm.personal_best[i];
            }
        }
        result.history.push_back(swarm.global_best.scalar_cost);
    }
    result.best = swarm.global_best;
    return result;
}

namespace detail {

/// Contiguous sub-swarm ranges: the population is split as evenly as
/// possible over one swarm per objective.
inline std::vector<std::pair<std::size_t, std::size_t>> swarm_ranges(std::size_t population,
                                                                     std::size_t k) {
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    const std::size_t base = population / k;
    std::size_t extra = population % k;
    std::size_t begin = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t len = base + (extra > 0 ? 1 : 0);
        if (extra > 0) {
            --extra;
        }
        ranges.emplace_back(begin, begin + len);
        begin += len;
    }
    return ranges;
}

} // namespace detail

/// Vector-evaluated PSO: one sub-swarm per objective, each ranking personal
/// bests by its own objective only. The social attractor of swarm j is the
/// global best of swarm j+1 (ring). Every evaluated individual feeds the
/// grid archive, which is returned as the front.
inline ParetoFront run_vepso(const Problem& problem, const PsoConfig& cfg,
                             const ArchiveConfig& archive_cfg, std::uint64_t seed,
                             unsigned workers = 1, const MooObserver& observer = {}) {
    detail::check_pso_inputs(problem, cfg);
    const std::size_t k = problem.objective_count;
    if (k < 1) {
        throw std::invalid_argument("run_vepso: need at least one objective");
    }
    if (cfg.population < 2 * k) {
        throw std::invalid_argument("run_vepso: population too small for one swarm per objective");
    }
    const Weights weights = detail::uniform_weights(k);
    const auto ranges = detail::swarm_ranges(cfg.population, k);
    const std::size_t dim = problem.bounds.dim();

    RngStream init_rng(seed, 0);
    Population members = init_population(cfg.population, problem.bounds, init_rng,
                                         problem.seed_genes);
    evaluate_population(members, problem, weights, workers);
    std::vector<Genes> velocities(cfg.population, Genes(dim, 0.0));
    Population personal_best = members;

    auto swarm_best = [&](std::size_t j, const Individual* current) {
        const Individual* best = current;
        for (std::size_t i = ranges[j].first; i < ranges[j].second; ++i) {
            if (best == nullptr ||
                personal_best[i].objectives[j] < best->objectives[j]) {
                best = &personal_best[i];
            }
        }
        return *best;
    };

    std::vector<Individual> global_best;
    global_best.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        global_best.push_back(swarm_best(j, nullptr));
    }

    GridArchive archive(archive_cfg);
    for (const Individual& m : members) {
        archive.insert(m);
    }
    {
        auto aux = detail::aux_stream(seed, 0);
        archive.prune(aux);
    }
    if (observer) {
        observer(0, archive.front());
    }

    double inertia = cfg.inertia;
    for (std::size_t t = 1; t < cfg.iterations; ++t) {
        // Ring attractors snapshot before any particle moves.
        std::vector<Genes> attractor(k);
        for (std::size_t j = 0; j < k; ++j) {
            attractor[j] = global_best[(j + 1) % k].genes;
        }
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = ranges[j].first; i < ranges[j].second; ++i) {
                RngStream rng(seed, t * cfg.population + i);
                Genes& x = members[i].genes;
                Genes& v = velocities[i];
                for (std::size_t d = 0; d < dim; ++d) {
                    const double r1 = rng.uniform();
                    const double r2 = rng.uniform();
                    v[d] = inertia * v[d] +
                           cfg.cognitive * r1 * (personal_best[i].genes[d] - x[d]) +
                           cfg.social * r2 * (attractor[j][d] - x[d]);
                    if (cfg.v_max) {
                        v[d] = std::clamp(v[d], -(*cfg.v_max)[d], (*cfg.v_max)[d]);
                    }
                    x[d] += v[d];
                }
                x = clamp(std::move(x), problem.bounds);
                members[i].objectives.clear();
            }
        }
        inertia *= cfg.inertia_damping;
        evaluate_population(members, problem, weights, workers);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = ranges[j].first; i < ranges[j].second; ++i) {
                if (members[i].objectives[j] < personal_best[i].objectives[j]) {
                    personal_best[i] = members[i];
                }
            }
            global_best[j] = swarm_best(j, &global_best[j]);
        }
        for (const Individual& m : members) {
            archive.insert(m);
        }
        auto aux = detail::aux_stream(seed, t);
        archive.prune(aux);
        if (observer) {
            observer(t, archive.front());
        }
    }
    return archive.front();
}

/// Survivor selection over a candidate pool: whole fronts in order, the
/// split front truncated by descending crowding distance. Returned indices
/// are front-major.
inline std::vector<std::size_t> select_by_rank_crowding(
    const std::vector<ObjectiveVector>& points, std::size_t n) {
    std::vector<std::size_t> selected;
    selected.reserve(n);
    for (const auto& front : non_dominated_sort(points)) {
        if (selected.size() + front.size() <= n) {
            selected.insert(selected.end(), front.begin(), front.end());
        } else {
            const auto crowd = crowding_distances(points, front);
            std::vector<std::size_t> order(front.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return crowd[a] > crowd[b];
            });
            for (std::size_t r = 0; selected.size() < n; ++r) {
                selected.push_back(front[order[r]]);
            }
        }
        if (selected.size() == n) {
            break;
        }
    }
    return selected;
}

/// Non-dominated-sorting PSO. Leaders come from the archive's sparse grid
/// cells, with a mutation_rate chance of one uniformly redrawn gene on the
/// leader copy. After the position update the union of the pre- and
/// post-update particle sets (size 2N) is sorted and truncated back to N by
/// rank then crowding.
inline ParetoFront run_nspso(const Problem& problem, const PsoConfig& cfg,
                             const ArchiveConfig& archive_cfg, std::uint64_t seed,
                             unsigned workers = 1, const MooObserver& observer = {}) {
    detail::check_pso_inputs(problem, cfg);
    const std::size_t k = problem.objective_count;
    const std::size_t n = cfg.population;
    const std::size_t dim = problem.bounds.dim();
    const Weights weights = detail::uniform_weights(k);

    RngStream init_rng(seed, 0);
    Population members = init_population(n, problem.bounds, init_rng, problem.seed_genes);
    evaluate_population(members, problem, weights, workers);
    std::vector<Genes> velocities(n, Genes(dim, 0.0));
    Population personal_best = members;

    GridArchive archive(archive_cfg);
    for (const Individual& m : members) {
        archive.insert(m);
    }
    {
        auto aux = detail::aux_stream(seed, 0);
        archive.prune(aux);
    }
    if (observer) {
        observer(0, archive.front());
    }

    double inertia = cfg.inertia;
    for (std::size_t t = 1; t < cfg.iterations; ++t) {
        const Population old_members = members;
        const std::vector<Genes> old_velocities = velocities;
        const Population old_personal_best = personal_best;

        std::vector<RngStream> streams;
        streams.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            streams.emplace_back(seed, t * n + i);
        }

        for (std::size_t i = 0; i < n; ++i) {
            Individual leader = archive.select_leader(streams[i]);
            if (streams[i].uniform() < archive_cfg.mutation_rate) {
                const std::size_t d = streams[i].uniform_index(dim);
                leader.genes[d] =
                    streams[i].uniform(problem.bounds.lower[d], problem.bounds.upper[d]);
            }
            Genes& x = members[i].genes;
            Genes& v = velocities[i];
            for (std::size_t d = 0; d < dim; ++d) {
                const double r1 = streams[i].uniform();
                const double r2 = streams[i].uniform();
                v[d] = inertia * v[d] +
                       cfg.cognitive * r1 * (personal_best[i].genes[d] - x[d]) +
                       cfg.social * r2 * (leader.genes[d] - x[d]);
                if (cfg.v_max) {
                    v[d] = std::clamp(v[d], -(*cfg.v_max)[d], (*cfg.v_max)[d]);
                }
                x[d] += v[d];
            }
            x = clamp(std::move(x), problem.bounds);
            members[i].objectives.clear();
        }
        inertia *= cfg.inertia_damping;
        evaluate_population(members, problem, weights, workers);

        for (std::size_t i = 0; i < n; ++i) {
            const Dominance new_vs_best =
                dominates(members[i].objectives, personal_best[i].objectives);
            if (new_vs_best == Dominance::strictly) {
                personal_best[i] = members[i];
            } else if (new_vs_best == Dominance::none &&
                       dominates(personal_best[i].objectives, members[i].objectives) ==
                           Dominance::none &&
                       streams[i].uniform() < 0.5) {
                personal_best[i] = members[i];
            }
        }

        for (const Individual& m : members) {
            archive.insert(m);
        }

        // 2N pool: pre-update records keep their old velocity and personal
        // best, post-update records carry the fresh ones.
        std::vector<ObjectiveVector> pool(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            pool[i] = old_members[i].objectives;
            pool[n + i] = members[i].objectives;
        }
        const auto keep = select_by_rank_crowding(pool, n);
        Population next_members;
        std::vector<Genes> next_velocities;
        Population next_personal_best;
        next_members.reserve(n);
        next_velocities.reserve(n);
        next_personal_best.reserve(n);
        for (std::size_t idx : keep) {
            if (idx < n) {
                next_members.push_back(old_members[idx]);
                next_velocities.push_back(old_velocities[idx]);
                next_personal_best.push_back(old_personal_best[idx]);
            } else {
                next_members.push_back(members[idx - n]);
                next_velocities.push_back(velocities[idx - n]);
                next_personal_best.push_back(personal_best[idx - n]);
            }
        }
        members = std::move(next_members);
        velocities = std::move(next_velocities);
        personal_best = std::move(next_personal_best);

        auto aux = detail::aux_stream(seed, t);
        archive.prune(aux);
        if (observer) {
            observer(t, archive.front());
        }
    }
    return archive.front();
}

} // namespace pdtune
