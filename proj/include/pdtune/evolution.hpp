#pragma once

#include "pdtune/objectives.hpp"
#include "pdtune/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace pdtune {

using Genes = std::vector<double>;

/// Per-dimension box bounds of the search space.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const { return lower.size(); }

    void validate() const {
        if (lower.empty() || lower.size() != upper.size()) {
            throw std::invalid_argument("Bounds: lower/upper must be non-empty and equal length");
        }
        for (std::size_t d = 0; d < lower.size(); ++d) {
            if (!(lower[d] <= upper[d])) {
                throw std::invalid_argument("Bounds: min must not exceed max");
            }
        }
    }
};

/// Per-dimension projection onto [min, max].
inline Genes clamp(Genes genes, const Bounds& bounds) {
    for (std::size_t d = 0; d < genes.size(); ++d) {
        genes[d] = std::clamp(genes[d], bounds.lower[d], bounds.upper[d]);
    }
    return genes;
}

/// A candidate solution: decision vector, its objective values once
/// evaluated, the aggregated scalar cost, and the book-keeping used by the
/// non-dominated-sorting variants.
struct Individual {
    Genes genes;
    ObjectiveVector objectives; // empty until evaluated
    double scalar_cost = std::numeric_limits<double>::quiet_NaN();
    int rank = 0;
    double crowding = 0.0;

    bool evaluated() const { return !objectives.empty(); }
};

using Population = std::vector<Individual>;

/// A bounded minimization problem. `evaluate` must be pure: identical genes
/// give identical objective vectors, which is what makes parallel evaluation
/// order-independent.
struct Problem {
    Bounds bounds;
    std::size_t objective_count = 1;
    std::function<ObjectiveVector(const Genes&)> evaluate;
    std::optional<Genes> seed_genes; // replaces member 0 at initialization
};

/// Uniform random population within bounds. When seed genes are supplied
/// they replace member 0, clamped into bounds.
inline Population init_population(std::size_t size, const Bounds& bounds, RngStream& rng,
                                  const std::optional<Genes>& seed_genes = std::nullopt) {
    if (size < 2) {
        throw std::invalid_argument("init_population: size must be at least 2");
    }
    bounds.validate();
    Population pop(size);
    for (auto& ind : pop) {
        ind.genes.resize(bounds.dim());
        for (std::size_t d = 0; d < bounds.dim(); ++d) {
            ind.genes[d] = rng.uniform(bounds.lower[d], bounds.upper[d]);
        }
    }
    if (seed_genes) {
        if (seed_genes->size() != bounds.dim()) {
            throw std::invalid_argument("init_population: seed dimension mismatch");
        }
        pop[0].genes = clamp(*seed_genes, bounds);
    }
    return pop;
}

/// Contiguous index blocks of ceil(n / workers), one per worker; trailing
/// workers may receive empty ranges.
inline std::vector<std::pair<std::size_t, std::size_t>> partition_ranges(std::size_t n,
                                                                         unsigned workers) {
    if (workers == 0) {
        throw std::invalid_argument("partition_ranges: workers must be >= 1");
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    ranges.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        ranges.emplace_back(begin, end);
    }
    return ranges;
}

/// Fills the objective vector of every not-yet-evaluated member and refreshes
/// every scalar cost. Evaluations fan out over `workers` threads into fixed
/// slots, so the result is identical for any worker count.
inline void evaluate_population(Population& pop, const Problem& problem, const Weights& weights,
                                unsigned workers = 1) {
    std::vector<std::size_t> todo;
    todo.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!pop[i].evaluated()) {
            todo.push_back(i);
        }
    }

    auto eval_one = [&](std::size_t i) {
        pop[i].objectives = problem.evaluate(pop[i].genes);
        if (pop[i].objectives.size() != problem.objective_count) {
            throw std::logic_error("evaluate_population: objective dimension mismatch");
        }
    };

    if (workers <= 1 || todo.size() <= 1) {
        for (std::size_t i : todo) {
            eval_one(i);
        }
    } else {
        const auto ranges = partition_ranges(todo.size(), workers);
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(ranges.size());
        for (std::size_t w = 0; w < ranges.size(); ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = ranges[w].first; k < ranges[w].second; ++k) {
                        eval_one(todo[k]);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    for (auto& ind : pop) {
        ind.scalar_cost = aggregate(ind.objectives, weights);
    }
}

} // namespace pdtune
