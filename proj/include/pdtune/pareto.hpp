#pragma once

#include "pdtune/evolution.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pdtune {

enum class Dominance { none, weakly, strictly };

/// Minimization dominance: a weakly dominates b when a is no worse in every
/// component, strictly when it is additionally better in at least one.
/// Equal vectors weakly dominate each other.
inline Dominance dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("dominates: objective dimension mismatch");
    }
    bool better_somewhere = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) {
            return Dominance::none;
        }
        if (a[i] < b[i]) {
            better_somewhere = true;
        }
    }
    return better_somewhere ? Dominance::strictly : Dominance::weakly;
}

/// Fast non-dominated sort. Front 0 holds the points not strictly dominated
/// by any other; later fronts repeat after removal. Every index lands in
/// exactly one front.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(
    const std::vector<ObjectiveVector>& points) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> fronts;
    if (n == 0) {
        return fronts;
    }

    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> dominator_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Dominance d = dominates(points[i], points[j]);
            if (d == Dominance::strictly) {
                dominated_by[i].push_back(j);
                ++dominator_count[j];
            } else if (d == Dominance::none &&
                       dominates(points[j], points[i]) == Dominance::strictly) {
                dominated_by[j].push_back(i);
                ++dominator_count[i];
            }
        }
    }

    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (dominator_count[i] == 0) {
            current.push_back(i);
        }
    }
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            for (std::size_t j : dominated_by[i]) {
                if (--dominator_count[j] == 0) {
                    next.push_back(j);
                }
            }
        }
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

/// NSGA-II crowding distance of each member of one front, indexed like the
/// front. Boundary points of every objective get infinity.
inline std::vector<double> crowding_distances(const std::vector<ObjectiveVector>& points,
                                              const std::vector<std::size_t>& front) {
    const std::size_t m = front.size();
    std::vector<double> dist(m, 0.0);
    if (m == 0) {
        return dist;
    }
    const std::size_t k = points[front[0]].size();
    std::vector<std::size_t> order(m);
    for (std::size_t obj = 0; obj < k; ++obj) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points[front[a]][obj] < points[front[b]][obj];
        });
        const double lo = points[front[order.front()]][obj];
        const double hi = points[front[order.back()]][obj];
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) {
            continue;
        }
        for (std::size_t r = 1; r + 1 < m; ++r) {
            dist[order[r]] += (points[front[order[r + 1]]][obj] -
                               points[front[order[r - 1]]][obj]) /
                              (hi - lo);
        }
    }
    return dist;
}

/// Archive of mutually non-dominated individuals. Inserts preserve the
/// antichain invariant and reject duplicates of an existing objective
/// vector (a duplicate is weakly dominated by its twin).
class ParetoFront {
public:
    ParetoFront() = default;

    const std::vector<Individual>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    /// Returns true when the candidate entered the archive. Members weakly
    /// dominated by the candidate are removed.
    bool insert(Individual candidate) {
        if (!candidate.evaluated()) {
            throw std::invalid_argument("ParetoFront::insert: candidate not evaluated");
        }
        for (const Individual& m : members_) {
            if (dominates(m.objectives, candidate.objectives) != Dominance::none) {
                return false;
            }
        }
        std::erase_if(members_, [&](const Individual& m) {
            return dominates(candidate.objectives, m.objectives) != Dominance::none;
        });
        members_.push_back(std::move(candidate));
        return true;
    }

    void remove_at(std::size_t index) { members_.erase(members_.begin() + index); }

    /// Builds a front from arbitrary members: duplicates of an objective
    /// vector collapse to the first occurrence and dominated entries drop.
    static ParetoFront from_members(const std::vector<Individual>& members) {
        ParetoFront front;
        for (const Individual& m : members) {
            front.insert(m);
        }
        return front;
    }

private:
    std::vector<Individual> members_;
};

/// Mean over the front of the product of each member's objective values;
/// smaller indicates a better front.
inline double normalized_hypervolume(const ParetoFront& front) {
    if (front.empty()) {
        throw std::invalid_argument("normalized_hypervolume: empty front");
    }
    double total = 0.0;
    for (const Individual& m : front.members()) {
        double prod = 1.0;
        for (double f : m.objectives) {
            prod *= f;
        }
        total += prod;
    }
    return total / static_cast<double>(front.size());
}

/// Number of members of b weakly dominated by at least one member of a,
/// reported together with |b|.
inline std::pair<std::size_t, std::size_t> relative_coverage(const ParetoFront& a,
                                                             const ParetoFront& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("relative_coverage: empty front");
    }
    std::size_t covered = 0;
    for (const Individual& target : b.members()) {
        for (const Individual& source : a.members()) {
            if (dominates(source.objectives, target.objectives) != Dominance::none) {
                ++covered;
                break;
            }
        }
    }
    return {covered, b.size()};
}

} // namespace pdtune
