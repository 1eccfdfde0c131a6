#pragma once

#include "pdtune/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pdtune {

// Exit codes: 0 all requested artifacts written, 2 configuration or usage
// error, 3 the simulated trajectory tripped the instability guards (output
// is still written).
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitUnstable = 3;

namespace detail {

inline ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) {
        return ExperimentConfig{};
    }
    return parse_config_file(path);
}

inline Genes parse_gains_list(const std::string& text) {
    std::vector<std::string> tokens;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        tokens.push_back(token);
    }
    if (tokens.size() != 8) {
        throw std::invalid_argument("expected 8 comma-separated gains, got " +
                                    std::to_string(tokens.size()));
    }
    Genes genes;
    for (const auto& t : tokens) {
        try {
            genes.push_back(parse_double(t));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad gains token '" + t + "'");
        }
    }
    return genes;
}

inline std::string valid_algorithm_names() {
    std::string names;
    for (const auto& [alg, name] : algorithm_names()) {
        names += (names.empty() ? "" : ", ") + name;
    }
    return names;
}

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
    std::filesystem::path p = dir.empty() ? "." : dir;
    std::filesystem::create_directories(p);
    return p;
}

/// front_nsbbo.csv -> nsbbo, anything_else.csv -> anything_else
inline std::string front_label(const std::string& file) {
    std::string stem = std::filesystem::path(file).stem().string();
    if (stem.rfind("front_", 0) == 0) {
        stem = stem.substr(6);
    }
    return stem;
}

inline void echo_metrics(const FrontComparison& cmp, std::ostream& out) {
    const std::size_t n = cmp.names.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                out << "coverage_" << cmp.names[i] << '_' << cmp.names[j] << '='
                    << cmp.coverage[i][j] << '/' << cmp.sizes[j] << '\n';
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out << "hypervolume_" << cmp.names[i] << '=' << format_double(cmp.hypervolume[i])
            << '\n';
        out << "points_" << cmp.names[i] << '=' << cmp.sizes[i] << '\n';
        out << "dominated_" << cmp.names[i] << '=' << cmp.union_dominated[i] << '/'
            << cmp.sizes[i] << '\n';
    }
}

} // namespace detail

/// Entry point shared by the binary and the tests. Arguments exclude the
/// program name; key=value results go to `out`, diagnostics to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"quadrotor PD gain tuning via evolutionary search"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string gains_text;
    std::string algorithm_text;
    std::string axis;
    std::vector<std::string> sweep_values;
    std::vector<std::string> front_files;
    std::vector<unsigned> worker_counts;

    auto* sim = app.add_subcommand("simulate", "roll out one gain vector and report its cost");
    sim->add_option("--config", config_path, "experiment config file");
    sim->add_option("--gains", gains_text, "8 comma-separated gains (default: baseline)");
    sim->add_option("--out", out_dir, "output directory");

    auto* tune = app.add_subcommand("tune", "run a tuning campaign");
    tune->add_option("--config", config_path, "experiment config file");
    tune->add_option("--algorithm", algorithm_text, "bbo|pso|vebbo|vepso|nsbbo|nspso");
    tune->add_option("--out", out_dir, "output directory");

    auto* metrics = app.add_subcommand("metrics", "compare Pareto front files");
    metrics->add_option("--fronts", front_files, "two or more front CSV files")
        ->delimiter(',')
        ->required();
    metrics->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "parameter sensitivity sweep");
    sweep->add_option("--config", config_path, "experiment config file");
    sweep->add_option("--axis", axis, "population|emigration|c1|c2|w")->required();
    sweep->add_option("--values", sweep_values, "comma-separated axis values")
        ->delimiter(',')
        ->required();
    sweep->add_option("--algorithm", algorithm_text, "override the configured algorithm");
    sweep->add_option("--out", out_dir, "output directory");

    auto* timing = app.add_subcommand("timing", "same campaign under several worker counts");
    timing->add_option("--config", config_path, "experiment config file");
    timing->add_option("--workers", worker_counts, "comma-separated worker counts")
        ->delimiter(',')
        ->required();
    timing->add_option("--out", out_dir, "output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        ExperimentConfig cfg = detail::load_config(config_path);
        if (!algorithm_text.empty()) {
            const auto alg = parse_algorithm(algorithm_text);
            if (!alg) {
                err << "unknown algorithm '" << algorithm_text
                    << "'; valid names: " << detail::valid_algorithm_names() << '\n';
                return kExitConfigError;
            }
            cfg.algorithm = *alg;
        }
        const auto out_path = detail::prepare_out_dir(out_dir);

        if (sim->parsed()) {
            const Genes genes =
                gains_text.empty() ? cfg.baseline.to_vector() : detail::parse_gains_list(gains_text);
            const Trajectory traj = simulate(PdGains::from(genes), cfg.reference, cfg.initial,
                                             cfg.drone, cfg.dt, cfg.t_final);
            const auto path = out_path / "trajectory.csv";
            std::ofstream file(path);
            if (!file) {
                throw std::runtime_error("cannot open for writing: " + path.string());
            }
            write_trajectory_csv(traj, file);
            const ObjectiveVector obj = evaluate_objectives(traj, cfg.reference);
            out << "f_phi=" << format_double(obj[0]) << '\n';
            out << "f_theta=" << format_double(obj[1]) << '\n';
            out << "f_psi=" << format_double(obj[2]) << '\n';
            out << "f_z=" << format_double(obj[3]) << '\n';
            out << "cost=" << format_double(aggregate(obj, cfg.weights)) << '\n';
            out << "stable=" << (traj.stable ? 1 : 0) << '\n';
            out << "trajectory_csv=" << path.string() << '\n';
            if (!traj.stable) {
                err << "warning: trajectory tripped the instability guards\n";
                return kExitUnstable;
            }
            return kExitOk;
        }

        if (tune->parsed()) {
            const CampaignReport report = run_campaign(cfg);
            out << "algorithm=" << algorithm_name(cfg.algorithm) << '\n';
            out << "trials=" << report.trials.size() << '\n';
            if (!is_multi_objective(cfg.algorithm)) {
                const auto path = out_path / "campaign.csv";
                write_csv_file(path.string(), campaign_csv(report));
                out << "campaign_csv=" << path.string() << '\n';
                for (const std::string state : {"z", "theta", "phi", "thrust"}) {
                    const auto traj_path = out_path / ("traj_" + state + ".csv");
                    write_csv_file(traj_path.string(), trajectory_stat_csv(report, state));
                    out << "traj_" << state << "_csv=" << traj_path.string() << '\n';
                }
                const std::size_t best = static_cast<std::size_t>(
                    std::min_element(report.trials.begin(), report.trials.end(),
                                     [](const TrialReport& a, const TrialReport& b) {
                                         return a.final_metric < b.final_metric;
                                     }) -
                    report.trials.begin());
                std::string gains;
                for (double g : report.trials[best].best_genes) {
                    gains += (gains.empty() ? "" : ",") + format_double(g);
                }
                out << "best_cost=" << format_double(report.min_metric) << '\n';
                out << "mean_cost=" << format_double(report.mean_metric) << '\n';
                out << "std_cost=" << format_double(report.std_metric) << '\n';
                out << "best_gains=" << gains << '\n';
            } else {
                const std::size_t rep = representative_trial(report);
                const ParetoFront& front = report.trials[rep].front;
                const auto path =
                    out_path / ("front_" + algorithm_name(cfg.algorithm) + ".csv");
                write_csv_file(path.string(), front_csv(front));
                out << "front_csv=" << path.string() << '\n';
                out << "front_size=" << front.size() << '\n';
                out << "hypervolume=" << format_double(normalized_hypervolume(front)) << '\n';
                out << "mean_hypervolume=" << format_double(report.mean_metric) << '\n';
                out << "std_hypervolume=" << format_double(report.std_metric) << '\n';
            }
            return kExitOk;
        }

        if (metrics->parsed()) {
            if (front_files.size() < 2) {
                err << "metrics needs at least two front files\n";
                return kExitConfigError;
            }
            std::vector<std::pair<std::string, ParetoFront>> fronts;
            for (const auto& file : front_files) {
                try {
                    fronts.emplace_back(detail::front_label(file),
                                        read_front_csv(read_csv_file(file)));
                } catch (const std::exception& e) {
                    err << "cannot parse front file '" << file << "': " << e.what() << '\n';
                    return kExitConfigError;
                }
            }
            const FrontComparison cmp = compare_fronts(fronts);
            const auto path = out_path / "metrics.csv";
            write_csv_file(path.string(), metrics_csv(cmp));
            detail::echo_metrics(cmp, out);
            out << "metrics_csv=" << path.string() << '\n';
            return kExitOk;
        }

        if (sweep->parsed()) {
            const SweepResult result = sensitivity_sweep(cfg, axis, sweep_values);
            const auto path = out_path / ("sweep_" + axis + ".csv");
            write_csv_file(path.string(), sweep_csv(result));
            for (const auto& row : result.rows) {
                out << "sweep_" << axis << '_' << row.value << '='
                    << format_double(row.mean_metric) << '\n';
            }
            out << "sweep_csv=" << path.string() << '\n';
            return kExitOk;
        }

        if (timing->parsed()) {
            const auto rows = timing_comparison(cfg, worker_counts);
            const auto path = out_path / "timing.csv";
            write_csv_file(path.string(), timing_csv(rows));
            for (const auto& row : rows) {
                out << "timing_workers_" << row.workers << '='
                    << format_double(row.seconds) << '\n';
            }
            out << "mean_cost=" << format_double(rows.front().mean_metric) << '\n';
            if (rows.size() > 1) {
                out << "speedup=" << format_double(rows.front().seconds / rows.back().seconds)
                    << '\n';
            }
            out << "timing_csv=" << path.string() << '\n';
            return kExitOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}

} // namespace pdtune
