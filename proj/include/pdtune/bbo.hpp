#pragma once

#include "pdtune/pareto.hpp"
#include "pdtune/pso.hpp" // ScalarRunResult, MooObserver, stream-id layout

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pdtune {

enum class EmigrationModel { linear, sinusoidal };

struct BboConfig {
    std::size_t population = 50;
    std::size_t iterations = 30;
    std::size_t elites = 2;        // N_e
    double mutation_prob = 0.01;   // per-gene uniform redraw; 0 disables
    EmigrationModel emigration = EmigrationModel::linear;

    void validate() const {
        if (population < 2) {
            throw std::invalid_argument("BboConfig: population must be >= 2");
        }
        if (iterations < 1) {
            throw std::invalid_argument("BboConfig: iterations must be >= 1");
        }
        if (elites >= population) {
            throw std::invalid_argument("BboConfig: elites must be < population");
        }
        if (!(mutation_prob >= 0.0) || mutation_prob > 1.0) {
            throw std::invalid_argument("BboConfig: mutation_prob must be in [0, 1]");
        }
    }
};

struct MigrationRates {
    double emigration;  // E_r
    double immigration; // I_r = 1 - E_r
};

/// Rank-dependent migration rates, rank 1 = fittest.
/// Linear: E_r = (p_s + 1 - rank) / (p_s + 1). Sinusoidal:
/// E_r = (1 + cos(pi * rank / p_s)) / 2. Both satisfy E_r + I_r = 1.
inline MigrationRates migration_rates(std::size_t rank, std::size_t population,
                                      EmigrationModel model) {
    if (rank < 1 || rank > population) {
        throw std::out_of_range("migration_rates: rank must be in [1, population]");
    }
    double emigration = 0.0;
    if (model == EmigrationModel::linear) {
        emigration = static_cast<double>(population + 1 - rank) /
                     static_cast<double>(population + 1);
    } else {
        emigration = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(rank) /
                                           static_cast<double>(population)));
    }
    return {emigration, 1.0 - emigration};
}

/// One migration generation over a fitness-sorted population (index 0 =
/// fittest, rank = index + 1). The top `elites` members pass through
/// untouched, objectives included. Every other member immigrates each gene
/// with probability I_r, drawing the source by roulette over the other
/// members' emigration rates, then mutates each gene with probability
/// mutation_prob by a uniform redraw inside the bounds. Migrated members are
/// marked for re-evaluation.
template <class StreamFactory>
Population bbo_step(const Population& sorted_pop, const BboConfig& cfg, const Bounds& bounds,
                    StreamFactory&& streams) {
    cfg.validate();
    const std::size_t n = sorted_pop.size();
    const std::size_t dim = bounds.dim();

    std::vector<double> emigration(n);
    std::vector<double> immigration(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto rates = migration_rates(i + 1, n, cfg.emigration);
        emigration[i] = rates.emigration;
        immigration[i] = rates.immigration;
    }

    Population next = sorted_pop;
    for (std::size_t i = cfg.elites; i < n; ++i) {
        auto rng = streams(i);
        // Roulette over everyone else's emigration rate; the total is the
        // same for every gene of this member.
        double total = 0.0;
        std::size_t last_candidate = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                total += emigration[j];
                last_candidate = j;
            }
        }
        Genes genes = sorted_pop[i].genes;
        bool touched = false;
        for (std::size_t d = 0; d < dim; ++d) {
            if (rng.uniform() < immigration[i]) {
                double u = rng.uniform() * total;
                std::size_t source = last_candidate;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) {
                        continue;
                    }
                    u -= emigration[j];
                    if (u <= 0.0) {
                        source = j;
                        break;
                    }
                }
                genes[d] = sorted_pop[source].genes[d];
                touched = true;
            }
        }
        for (std::size_t d = 0; d < dim; ++d) {
            if (cfg.mutation_prob > 0.0 && rng.uniform() < cfg.mutation_prob) {
                genes[d] = rng.uniform(bounds.lower[d], bounds.upper[d]);
                touched = true;
            }
        }
        if (touched) {
            next[i].genes = clamp(std::move(genes), bounds);
            next[i].objectives.clear();
            next[i].scalar_cost = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return next;
}

namespace detail {

inline void sort_by_scalar_cost(Population& pop) {
    std::stable_sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
        return a.scalar_cost < b.scalar_cost;
    });
}

inline void sort_by_objective(Population& pop, std::size_t j) {
    std::stable_sort(pop.begin(), pop.end(), [j](const Individual& a, const Individual& b) {
        return a.objectives[j] < b.objectives[j];
    });
}

/// Domination-level ordering: fronts in sequence, within a front by
/// descending crowding distance. Fills rank and crowding on the members.
inline void sort_by_domination(Population& pop) {
    std::vector<ObjectiveVector> points;
    points.reserve(pop.size());
    for (const Individual& ind : pop) {
        points.push_back(ind.objectives);
    }
    const auto fronts = non_dominated_sort(points);
    std::vector<std::size_t> order;
    order.reserve(pop.size());
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        const auto crowd = crowding_distances(points, fronts[f]);
        std::vector<std::size_t> local(fronts[f].size());
        std::iota(local.begin(), local.end(), std::size_t{0});
        std::stable_sort(local.begin(), local.end(), [&](std::size_t a, std::size_t b) {
            return crowd[a] > crowd[b];
        });
        for (std::size_t pos : local) {
            pop[fronts[f][pos]].rank = static_cast<int>(f) + 1;
            pop[fronts[f][pos]].crowding = crowd[pos];
            order.push_back(fronts[f][pos]);
        }
    }
    Population sorted;
    sorted.reserve(pop.size());
    for (std::size_t idx : order) {
        sorted.push_back(std::move(pop[idx]));
    }
    pop = std::move(sorted);
}

} // namespace detail

/// Aggregation BBO: evaluate, sort by the weighted cost, migrate. The first
/// history entry is the best of the evaluated initial population.
inline ScalarRunResult run_bbo(const Problem& problem, const BboConfig& cfg,
                               const Weights& weights, std::uint64_t seed,
                               unsigned workers = 1) {
    cfg.validate();
    problem.bounds.validate();
    weights.validate();

    RngStream init_rng(seed, 0);
    Population pop = init_population(cfg.population, problem.bounds, init_rng,
                                     problem.seed_genes);
    evaluate_population(pop, problem, weights, workers);
    detail::sort_by_scalar_cost(pop);

    ScalarRunResult result;
    result.history.push_back(pop.front().scalar_cost);
    for (std::size_t t = 1; t < cfg.iterations; ++t) {
        pop = bbo_step(pop, cfg, problem.bounds, [&](std::size_t i) {
            return RngStream(seed, t * cfg.population + i);
        });
        evaluate_population(pop, problem, weights, workers);
        detail::sort_by_scalar_cost(pop);
        result.history.push_back(pop.front().scalar_cost);
    }
    result.best = pop.front();
    return result;
}

/// Vector-evaluated BBO: the active objective cycles each generation and
/// provides both the fitness ranking and the migration rates; every
/// evaluated individual accumulates into an unbounded non-dominated archive.
inline ParetoFront run_vebbo(const Problem& problem, const BboConfig& cfg, std::uint64_t seed,
                             unsigned workers = 1, const MooObserver& observer = {}) {
    cfg.validate();
    problem.bounds.validate();
    const std::size_t k = problem.objective_count;
    const Weights weights = detail::uniform_weights(k);

    RngStream init_rng(seed, 0);
    Population pop = init_population(cfg.population, problem.bounds, init_rng,
                                     problem.seed_genes);
    evaluate_population(pop, problem, weights, workers);

    ParetoFront archive;
    for (const Individual& ind : pop) {
        archive.insert(ind);
    }
    if (observer) {
        observer(0, archive);
    }

    for (std::size_t t = 1; t < cfg.iterations; ++t) {
        const std::size_t active = (t - 1) % k;
        detail::sort_by_objective(pop, active);
        pop = bbo_step(pop, cfg, problem.bounds, [&](std::size_t i) {
            return RngStream(seed, t * cfg.population + i);
        });
        evaluate_population(pop, problem, weights, workers);
        for (const Individual& ind : pop) {
            archive.insert(ind);
        }
        if (observer) {
            observer(t, archive);
        }
    }
    return archive;
}

/// Non-dominated-sorting BBO: migration ranks follow the domination level
/// (front index, crowding-distance tie-break); archive accumulation as in
/// run_vebbo.
inline ParetoFront run_nsbbo(const Problem& problem, const BboConfig& cfg, std::uint64_t seed,
                             unsigned workers = 1, const MooObserver& observer = {}) {
    cfg.validate();
    problem.bounds.validate();
    const Weights weights = detail::uniform_weights(problem.objective_count);

    RngStream init_rng(seed, 0);
    Population pop = init_population(cfg.population, problem.bounds, init_rng,
                                     problem.seed_genes);
    evaluate_population(pop, problem, weights, workers);

    ParetoFront archive;
    for (const Individual& ind : pop) {
        archive.insert(ind);
    }
    if (observer) {
        observer(0, archive);
    }

    for (std::size_t t = 1; t < cfg.iterations; ++t) {
        detail::sort_by_domination(pop);
        pop = bbo_step(pop, cfg, problem.bounds, [&](std::size_t i) {
            return RngStream(seed, t * cfg.population + i);
        });
        evaluate_population(pop, problem, weights, workers);
        for (const Individual& ind : pop) {
            archive.insert(ind);
        }
        if (observer) {
            observer(t, archive);
        }
    }
    return archive;
}

} // namespace pdtune
