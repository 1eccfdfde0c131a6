#pragma once

#include "pdtune/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdtune {

/// Bundles the closed-loop rollout and the tracking-error objectives into a
/// Problem the optimizers can consume. The evaluator is pure and returns the
/// instability penalty for divergent candidates.
inline Problem make_drone_problem(const ExperimentConfig& cfg) {
    cfg.validate();
    Problem problem;
    problem.bounds = cfg.bounds;
    problem.objective_count = 4;
    if (cfg.seed_baseline) {
        problem.seed_genes = cfg.baseline.to_vector();
    }
    const DroneParams drone = cfg.drone;
    const Reference ref = cfg.reference;
    const DroneState init = cfg.initial;
    const double dt = cfg.dt;
    const double t_final = cfg.t_final;
    problem.evaluate = [drone, ref, init, dt, t_final](const Genes& genes) {
        const Trajectory traj = simulate(PdGains::from(genes), ref, init, drone, dt, t_final);
        return evaluate_objectives(traj, ref);
    };
    return problem;
}

/// Aggregated cost of the hand-tuned baseline gains under the same rollout.
inline double baseline_cost(const ExperimentConfig& cfg) {
    const Trajectory traj =
        simulate(cfg.baseline, cfg.reference, cfg.initial, cfg.drone, cfg.dt, cfg.t_final);
    return aggregate(evaluate_objectives(traj, cfg.reference), cfg.weights);
}

/// Outcome of one seeded optimizer run. Aggregation algorithms fill history,
/// best_genes and best_trajectory; the Pareto variants fill front. In both
/// cases final_metric is the figure the campaign statistics summarize: the
/// final best cost, or the front's normalized hypervolume.
struct TrialReport {
    std::vector<double> history;
    Genes best_genes;
    Trajectory best_trajectory;
    ParetoFront front;
    double final_metric = 0.0;
    double wall_seconds = 0.0;
};

struct CampaignReport {
    Algorithm algorithm = Algorithm::bbo;
    std::vector<TrialReport> trials;
    double min_metric = 0.0;
    double max_metric = 0.0;
    double mean_metric = 0.0;
    double std_metric = 0.0;

    // Pointwise statistics over the per-trial best-gain rollouts
    // (aggregation algorithms only), truncated to the shortest trial.
    std::vector<double> traj_times;
    std::vector<double> z_mean, z_std;
    std::vector<double> theta_mean, theta_std;
    std::vector<double> phi_mean, phi_std;
    std::vector<double> thrust_mean, thrust_std;
};

namespace detail {

inline std::pair<double, double> mean_and_sample_std(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0))};
}

} // namespace detail

/// One optimizer run with the seed derived from (master_seed, trial index).
inline TrialReport run_trial(const ExperimentConfig& cfg, std::size_t trial,
                             const MooObserver& observer = {}) {
    const Problem problem = make_drone_problem(cfg);
    const std::uint64_t seed = derive_seed(cfg.master_seed, trial);

    TrialReport report;
    const auto t0 = std::chrono::steady_clock::now();
    switch (cfg.algorithm) {
    case Algorithm::bbo:
    case Algorithm::pso: {
        const ScalarRunResult r =
            cfg.algorithm == Algorithm::bbo
                ? run_bbo(problem, cfg.bbo, cfg.weights, seed, cfg.workers)
                : run_pso(problem, cfg.pso, cfg.weights, seed, cfg.workers);
        report.history = r.history;
        report.best_genes = r.best.genes;
        report.final_metric = r.history.back();
        report.best_trajectory = simulate(PdGains::from(r.best.genes), cfg.reference,
                                          cfg.initial, cfg.drone, cfg.dt, cfg.t_final);
        break;
    }
    case Algorithm::vebbo:
        report.front = run_vebbo(problem, cfg.bbo, seed, cfg.workers, observer);
        break;
    case Algorithm::nsbbo:
        report.front = run_nsbbo(problem, cfg.bbo, seed, cfg.workers, observer);
        break;
    case Algorithm::vepso:
        report.front = run_vepso(problem, cfg.pso, cfg.archive, seed, cfg.workers, observer);
        break;
    case Algorithm::nspso:
        report.front = run_nspso(problem, cfg.pso, cfg.archive, seed, cfg.workers, observer);
        break;
    }
    if (is_multi_objective(cfg.algorithm)) {
        report.final_metric = normalized_hypervolume(report.front);
    }
    const auto t1 = std::chrono::steady_clock::now();
    report.wall_seconds =
        std::max(std::chrono::duration<double>(t1 - t0).count(),
                 std::numeric_limits<double>::min());
    return report;
}

/// Multi-trial campaign with cross-trial statistics over the final metric
/// and, for the aggregation algorithms, mean/std rollout trajectories under
/// each trial's best gains.
inline CampaignReport run_campaign(const ExperimentConfig& cfg) {
    cfg.validate();
    CampaignReport report;
    report.algorithm = cfg.algorithm;
    report.trials.reserve(cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        report.trials.push_back(run_trial(cfg, t));
    }

    std::vector<double> finals;
    finals.reserve(cfg.trials);
    for (const auto& trial : report.trials) {
        finals.push_back(trial.final_metric);
    }
    const auto [mean, sd] = detail::mean_and_sample_std(finals);
    report.mean_metric = mean;
    report.std_metric = sd;
    report.min_metric = *std::min_element(finals.begin(), finals.end());
    report.max_metric = *std::max_element(finals.begin(), finals.end());

    if (!is_multi_objective(cfg.algorithm)) {
        std::size_t len = report.trials.front().best_trajectory.size();
        for (const auto& trial : report.trials) {
            len = std::min(len, trial.best_trajectory.size());
        }
        report.traj_times.assign(report.trials.front().best_trajectory.times.begin(),
                                 report.trials.front().best_trajectory.times.begin() + len);
        auto fill = [&](auto getter, std::vector<double>& means, std::vector<double>& stds) {
            means.resize(len);
            stds.resize(len);
            std::vector<double> samples(report.trials.size());
            for (std::size_t k = 0; k < len; ++k) {
                for (std::size_t t = 0; t < report.trials.size(); ++t) {
                    samples[t] = getter(report.trials[t].best_trajectory, k);
                }
                const auto [m, s] = detail::mean_and_sample_std(samples);
                means[k] = m;
                stds[k] = s;
            }
        };
        fill([](const Trajectory& tr, std::size_t k) { return tr.states[k].eps[2]; },
             report.z_mean, report.z_std);
        fill([](const Trajectory& tr, std::size_t k) { return tr.states[k].eta[1]; },
             report.theta_mean, report.theta_std);
        fill([](const Trajectory& tr, std::size_t k) { return tr.states[k].eta[0]; },
             report.phi_mean, report.phi_std);
        fill([](const Trajectory& tr, std::size_t k) { return tr.inputs[k].thrust; },
             report.thrust_mean, report.thrust_std);
    }
    return report;
}

/// Index of the trial whose final metric is the (lower) median; used as the
/// representative front of a Pareto campaign.
inline std::size_t representative_trial(const CampaignReport& report) {
    std::vector<std::size_t> order(report.trials.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.trials[a].final_metric < report.trials[b].final_metric;
    });
    return order[(order.size() - 1) / 2];
}

// ---------------------------------------------------------------------------
// Sensitivity sweeps
// ---------------------------------------------------------------------------

struct SweepRow {
    std::string value;
    double mean_metric;
    double std_metric;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
};

inline const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes = {"population", "emigration", "c1", "c2", "w"};
    return axes;
}

/// Runs one campaign per value of the chosen parameter axis and tabulates
/// mean and standard deviation of the final metric.
inline SweepResult sensitivity_sweep(const ExperimentConfig& base, const std::string& axis,
                                     const std::vector<std::string>& values) {
    if (values.empty()) {
        throw std::invalid_argument("sensitivity_sweep: no values given");
    }
    SweepResult result;
    result.axis = axis;
    for (const std::string& value : values) {
        ExperimentConfig cfg = base;
        if (axis == "population") {
            const std::size_t p = detail::cfg_size(value);
            cfg.pso.population = p;
            cfg.bbo.population = p;
        } else if (axis == "emigration") {
            if (value == "linear") {
                cfg.bbo.emigration = EmigrationModel::linear;
            } else if (value == "sinusoidal") {
                cfg.bbo.emigration = EmigrationModel::sinusoidal;
            } else {
                throw std::invalid_argument("sensitivity_sweep: emigration value must be "
                                            "linear or sinusoidal");
            }
        } else if (axis == "c1") {
            cfg.pso.cognitive = parse_double(value);
        } else if (axis == "c2") {
            cfg.pso.social = parse_double(value);
        } else if (axis == "w") {
            cfg.pso.inertia = parse_double(value);
        } else {
            std::string known;
            for (const auto& a : sweep_axes()) {
                known += (known.empty() ? "" : ", ") + a;
            }
            throw std::invalid_argument("sensitivity_sweep: unknown axis '" + axis +
                                        "' (known: " + known + ")");
        }
        const CampaignReport report = run_campaign(cfg);
        result.rows.push_back({value, report.mean_metric, report.std_metric});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

struct TimingRow {
    unsigned workers;
    double seconds;
    double mean_metric;
};

/// Repeats the same campaign under each worker count. The numbers must agree
/// across rows; only the wall clock may differ.
inline std::vector<TimingRow> timing_comparison(const ExperimentConfig& base,
                                                const std::vector<unsigned>& worker_counts) {
    if (worker_counts.empty()) {
        throw std::invalid_argument("timing_comparison: no worker counts given");
    }
    std::vector<TimingRow> rows;
    rows.reserve(worker_counts.size());
    for (unsigned w : worker_counts) {
        if (w < 1) {
            throw std::invalid_argument("timing_comparison: worker counts must be >= 1");
        }
        ExperimentConfig cfg = base;
        cfg.workers = w;
        const auto t0 = std::chrono::steady_clock::now();
        const CampaignReport report = run_campaign(cfg);
        const auto t1 = std::chrono::steady_clock::now();
        rows.push_back({w, std::chrono::duration<double>(t1 - t0).count(), report.mean_metric});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Front comparison
// ---------------------------------------------------------------------------

struct FrontComparison {
    std::vector<std::string> names;
    std::vector<std::size_t> sizes;
    // coverage[i][j]: members of front j weakly dominated by some member of
    // front i; the diagonal is unused.
    std::vector<std::vector<std::size_t>> coverage;
    // Members of front j weakly dominated by at least one member of the
    // union of all other fronts.
    std::vector<std::size_t> union_dominated;
    std::vector<double> hypervolume;
};

inline FrontComparison compare_fronts(
    const std::vector<std::pair<std::string, ParetoFront>>& fronts) {
    if (fronts.size() < 2) {
        throw std::invalid_argument("compare_fronts: need at least two fronts");
    }
    for (const auto& [name, front] : fronts) {
        if (front.empty()) {
            throw std::invalid_argument("compare_fronts: front '" + name + "' is empty");
        }
    }
    const std::size_t n = fronts.size();
    FrontComparison cmp;
    cmp.coverage.assign(n, std::vector<std::size_t>(n, 0));
    cmp.union_dominated.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        cmp.names.push_back(fronts[i].first);
        cmp.sizes.push_back(fronts[i].second.size());
        cmp.hypervolume.push_back(normalized_hypervolume(fronts[i].second));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                cmp.coverage[i][j] =
                    relative_coverage(fronts[i].second, fronts[j].second).first;
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (const Individual& target : fronts[j].second.members()) {
            bool dominated = false;
            for (std::size_t i = 0; i < n && !dominated; ++i) {
                if (i == j) {
                    continue;
                }
                for (const Individual& source : fronts[i].second.members()) {
                    if (dominates(source.objectives, target.objectives) != Dominance::none) {
                        dominated = true;
                        break;
                    }
                }
            }
            if (dominated) {
                ++cmp.union_dominated[j];
            }
        }
    }
    return cmp;
}

// ---------------------------------------------------------------------------
// CSV shapes
// ---------------------------------------------------------------------------

/// Per-iteration best-cost statistics across trials (aggregation campaigns).
inline CsvTable campaign_csv(const CampaignReport& report) {
    CsvTable table;
    table.header = {"iteration", "mean_best_cost", "std_best_cost", "min_best_cost",
                    "max_best_cost"};
    if (report.trials.empty() || report.trials.front().history.empty()) {
        return table;
    }
    const std::size_t iters = report.trials.front().history.size();
    std::vector<double> samples(report.trials.size());
    for (std::size_t k = 0; k < iters; ++k) {
        for (std::size_t t = 0; t < report.trials.size(); ++t) {
            samples[t] = report.trials[t].history[k];
        }
        const auto [mean, sd] = detail::mean_and_sample_std(samples);
        table.rows.push_back({std::to_string(k + 1), format_double(mean), format_double(sd),
                              format_double(*std::min_element(samples.begin(), samples.end())),
                              format_double(*std::max_element(samples.begin(), samples.end()))});
    }
    return table;
}

/// Objective vectors and gains of one front, one member per row.
inline CsvTable front_csv(const ParetoFront& front) {
    CsvTable table;
    table.header = {"f_phi", "f_theta", "f_psi", "f_z"};
    for (const char* g : gain_names()) {
        table.header.push_back(g);
    }
    for (const Individual& m : front.members()) {
        std::vector<std::string> row;
        for (double f : m.objectives) {
            row.push_back(format_double(f));
        }
        for (double g : m.genes) {
            row.push_back(format_double(g));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Reads a front back: every column whose name starts with "f_" is an
/// objective, the remainder are genes.
inline ParetoFront read_front_csv(const CsvTable& table) {
    std::vector<Individual> members;
    for (const auto& row : table.rows) {
        Individual ind;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            const double v = parse_double(row[c]);
            if (table.header[c].rfind("f_", 0) == 0) {
                ind.objectives.push_back(v);
            } else {
                ind.genes.push_back(v);
            }
        }
        if (ind.objectives.empty()) {
            throw std::runtime_error("front csv has no f_* objective columns");
        }
        members.push_back(std::move(ind));
    }
    return ParetoFront::from_members(members);
}

/// Coverage pairs, per-front hypervolume rows and union-domination rows in
/// one table; empty cells where a field does not apply.
inline CsvTable metrics_csv(const FrontComparison& cmp) {
    CsvTable table;
    table.header = {"record", "front_a", "front_b", "covered", "total",
                    "hypervolume", "num_points"};
    const std::size_t n = cmp.names.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            table.rows.push_back({"coverage", cmp.names[i], cmp.names[j],
                                  std::to_string(cmp.coverage[i][j]),
                                  std::to_string(cmp.sizes[j]), "", ""});
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        table.rows.push_back({"hypervolume", cmp.names[i], "", "", "",
                              format_double(cmp.hypervolume[i]),
                              std::to_string(cmp.sizes[i])});
    }
    for (std::size_t i = 0; i < n; ++i) {
        table.rows.push_back({"domination", cmp.names[i], "",
                              std::to_string(cmp.union_dominated[i]),
                              std::to_string(cmp.sizes[i]), "", ""});
    }
    return table;
}

/// t/mean/std series of one tracked state; thrust also gets log10 of the
/// mean for plotting alongside the raw values.
inline CsvTable trajectory_stat_csv(const CampaignReport& report, const std::string& state) {
    const std::vector<double>* mean = nullptr;
    const std::vector<double>* sd = nullptr;
    if (state == "z") {
        mean = &report.z_mean;
        sd = &report.z_std;
    } else if (state == "theta") {
        mean = &report.theta_mean;
        sd = &report.theta_std;
    } else if (state == "phi") {
        mean = &report.phi_mean;
        sd = &report.phi_std;
    } else if (state == "thrust") {
        mean = &report.thrust_mean;
        sd = &report.thrust_std;
    } else {
        throw std::invalid_argument("trajectory_stat_csv: unknown state '" + state + "'");
    }
    CsvTable table;
    table.header = {"t", "mean", "std"};
    const bool log_thrust = state == "thrust";
    if (log_thrust) {
        table.header.push_back("log10_mean");
    }
    for (std::size_t k = 0; k < report.traj_times.size(); ++k) {
        std::vector<std::string> row = {format_double(report.traj_times[k]),
                                        format_double((*mean)[k]), format_double((*sd)[k])};
        if (log_thrust) {
            row.push_back(format_double(std::log10((*mean)[k])));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline CsvTable sweep_csv(const SweepResult& result) {
    CsvTable table;
    table.header = {result.axis, "mean_cost", "std_cost"};
    for (const auto& row : result.rows) {
        table.rows.push_back({row.value, format_double(row.mean_metric),
                              format_double(row.std_metric)});
    }
    return table;
}

inline CsvTable timing_csv(const std::vector<TimingRow>& rows) {
    CsvTable table;
    table.header = {"workers", "seconds", "mean_cost"};
    for (const auto& row : rows) {
        table.rows.push_back({std::to_string(row.workers), format_double(row.seconds),
                              format_double(row.mean_metric)});
    }
    return table;
}

} // namespace pdtune
