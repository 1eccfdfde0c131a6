#include "pdtune/pareto.hpp"
#include "pdtune/random.hpp"
#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace pdtune;

namespace {

// Definition-level oracle: peel off the set of points not strictly dominated
// by any remaining point, repeat.
std::vector<std::vector<std::size_t>> brute_force_fronts(
    const std::vector<ObjectiveVector>& points) {
    std::vector<std::size_t> remaining(points.size());
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> fronts;
    while (!remaining.empty()) {
        std::vector<std::size_t> front;
        for (std::size_t i : remaining) {
            bool dominated = false;
            for (std::size_t j : remaining) {
                if (i != j && dominates(points[j], points[i]) == Dominance::strictly) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) {
                front.push_back(i);
            }
        }
        std::vector<std::size_t> rest;
        std::set_difference(remaining.begin(), remaining.end(), front.begin(), front.end(),
                            std::back_inserter(rest));
        fronts.push_back(std::move(front));
        remaining = std::move(rest);
    }
    return fronts;
}

Individual point(ObjectiveVector objectives) {
    Individual ind;
    ind.objectives = std::move(objectives);
    return ind;
}

} // namespace

TEST_CASE("dominance relations on the textbook cases") {
    REQUIRE(dominates({1, 1, 1, 1}, {2, 2, 2, 2}) == Dominance::strictly);
    REQUIRE(dominates({1, 2}, {2, 1}) == Dominance::none);
    REQUIRE(dominates({2, 1}, {1, 2}) == Dominance::none);
    REQUIRE(dominates({1, 1}, {1, 1}) == Dominance::weakly);
    REQUIRE(dominates({1, 2}, {1, 3}) == Dominance::strictly);
    REQUIRE_THROWS_AS(dominates({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("sorting the textbook cases") {
    const auto two = non_dominated_sort({{1, 2}, {2, 1}});
    REQUIRE(two.size() == 1);
    REQUIRE(two[0] == std::vector<std::size_t>{0, 1});

    const auto chain = non_dominated_sort({{1, 1}, {2, 2}, {3, 3}});
    REQUIRE(chain.size() == 3);
    REQUIRE(chain[0] == std::vector<std::size_t>{0});
    REQUIRE(chain[2] == std::vector<std::size_t>{2});

    const auto dup = non_dominated_sort({{1, 1}, {1, 1}});
    REQUIRE(dup.size() == 1);
    REQUIRE(dup[0].size() == 2);
}

TEST_CASE("sorting agrees with the brute-force oracle") {
    RngStream rng(2024, 0);
    for (int instance = 0; instance < 300; ++instance) {
        const std::size_t n = 1 + rng.uniform_index(20);
        std::vector<ObjectiveVector> points(n);
        for (auto& p : points) {
            p.resize(4);
            for (double& v : p) {
                // quantized values provoke ties and duplicates
                v = static_cast<double>(rng.uniform_index(6));
            }
        }
        REQUIRE(non_dominated_sort(points) == brute_force_fronts(points));
    }
}

TEST_CASE("every index appears in exactly one front") {
    RngStream rng(9, 0);
    std::vector<ObjectiveVector> points(40);
    for (auto& p : points) {
        p = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    }
    const auto fronts = non_dominated_sort(points);
    std::vector<std::size_t> seen;
    for (const auto& f : fronts) {
        seen.insert(seen.end(), f.begin(), f.end());
    }
    std::sort(seen.begin(), seen.end());
    std::vector<std::size_t> expected(points.size());
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    REQUIRE(seen == expected);
}

TEST_CASE("crowding distance marks boundaries infinite") {
    const std::vector<ObjectiveVector> points = {{0, 3}, {1, 2}, {2, 1}, {3, 0}};
    const std::vector<std::size_t> front = {0, 1, 2, 3};
    const auto d = crowding_distances(points, front);
    REQUIRE(std::isinf(d[0]));
    REQUIRE(std::isinf(d[3]));
    REQUIRE(d[1] == Catch::Approx(4.0 / 3.0));
    REQUIRE(d[2] == Catch::Approx(4.0 / 3.0));
}

TEST_CASE("hypervolume of the textbook fronts") {
    ParetoFront single = ParetoFront::from_members({point({1, 1, 1, 1})});
    REQUIRE(normalized_hypervolume(single) == 1.0);

    ParetoFront pair = ParetoFront::from_members({point({1, 2}), point({2, 1})});
    REQUIRE(normalized_hypervolume(pair) == 2.0);

    REQUIRE_THROWS_AS(normalized_hypervolume(ParetoFront{}), std::invalid_argument);
}

TEST_CASE("hypervolume is homogeneous of degree k") {
    RngStream rng(31, 0);
    for (int instance = 0; instance < 50; ++instance) {
        std::vector<Individual> members;
        for (int m = 0; m < 12; ++m) {
            members.push_back(point({rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5),
                                     rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)}));
        }
        const ParetoFront front = ParetoFront::from_members(members);
        const double c = rng.uniform(0.5, 2.0);
        std::vector<Individual> scaled;
        for (const Individual& m : front.members()) {
            ObjectiveVector obj = m.objectives;
            for (double& v : obj) {
                v *= c;
            }
            scaled.push_back(point(obj));
        }
        const ParetoFront scaled_front = ParetoFront::from_members(scaled);
        REQUIRE(scaled_front.size() == front.size());
        const double expected = std::pow(c, 4) * normalized_hypervolume(front);
        REQUIRE(std::abs(normalized_hypervolume(scaled_front) - expected) <=
                1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("relative coverage on the textbook cases") {
    const ParetoFront origin = ParetoFront::from_members({point({0, 0})});
    const ParetoFront ones = ParetoFront::from_members({point({1, 1})});
    REQUIRE(relative_coverage(origin, ones) == std::pair<std::size_t, std::size_t>{1, 1});
    REQUIRE(relative_coverage(ones, origin) == std::pair<std::size_t, std::size_t>{0, 1});

    const ParetoFront mixed = ParetoFront::from_members(
        {point({0, 3}), point({1, 2}), point({3, 0})});
    REQUIRE(relative_coverage(mixed, mixed) ==
            std::pair<std::size_t, std::size_t>{mixed.size(), mixed.size()});

    REQUIRE_THROWS_AS(relative_coverage(ParetoFront{}, ones), std::invalid_argument);
    const ParetoFront wrong_dim = ParetoFront::from_members({point({1, 1, 1})});
    REQUIRE_THROWS_AS(relative_coverage(wrong_dim, ones), std::invalid_argument);
}

TEST_CASE("archive insertion keeps a duplicate-free antichain") {
    RngStream rng(77, 0);
    ParetoFront front;
    for (int k = 0; k < 300; ++k) {
        Individual ind = point({rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2),
                                rng.uniform(0, 2)});
        ind.genes = {rng.uniform()};
        front.insert(ind);
    }
    REQUIRE_FALSE(front.empty());
    REQUIRE(testutil::is_antichain(front, true));

    // an exact duplicate of an existing member is rejected
    const Individual dup = front.members().front();
    const std::size_t before = front.size();
    ParetoFront copy = front;
    REQUIRE_FALSE(copy.insert(dup));
    REQUIRE(copy.size() == before);
}

TEST_CASE("from_members deduplicates objective vectors") {
    const ParetoFront front = ParetoFront::from_members(
        {point({1, 2}), point({1, 2}), point({2, 1}), point({3, 3})});
    REQUIRE(front.size() == 2);
    REQUIRE(testutil::is_antichain(front, true));
}
