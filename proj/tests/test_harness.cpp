#include "pdtune/harness.hpp"
#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace pdtune;

namespace {

ExperimentConfig tiny_config(Algorithm alg) {
    ExperimentConfig cfg;
    cfg.algorithm = alg;
    cfg.trials = 2;
    cfg.workers = 1;
    cfg.t_final = 0.5;
    cfg.pso.population = 8;
    cfg.pso.iterations = 3;
    cfg.bbo.population = 8;
    cfg.bbo.iterations = 3;
    cfg.archive.capacity = 30;
    return cfg;
}

std::string render(const CsvTable& table) {
    std::stringstream ss;
    write_csv(ss, table);
    return ss.str();
}

} // namespace

TEST_CASE("a one-trial campaign has degenerate statistics") {
    ExperimentConfig cfg = tiny_config(Algorithm::bbo);
    cfg.trials = 1;
    const CampaignReport report = run_campaign(cfg);
    REQUIRE(report.trials.size() == 1);
    REQUIRE(report.min_metric == report.mean_metric);
    REQUIRE(report.max_metric == report.mean_metric);
    REQUIRE(report.std_metric == 0.0);
    REQUIRE(report.trials[0].wall_seconds > 0.0);
    REQUIRE(report.trials[0].history.size() == cfg.bbo.iterations);
}

TEST_CASE("campaign statistics are recomputable from the trials") {
    const CampaignReport report = run_campaign(tiny_config(Algorithm::pso));
    double sum = 0.0;
    for (const auto& t : report.trials) {
        sum += t.final_metric;
    }
    const double mean = sum / static_cast<double>(report.trials.size());
    double ss = 0.0;
    for (const auto& t : report.trials) {
        ss += (t.final_metric - mean) * (t.final_metric - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(report.trials.size() - 1));
    REQUIRE(report.mean_metric == mean);
    REQUIRE(report.std_metric == sd);
}

TEST_CASE("identical master seeds give bit-identical campaign outputs") {
    const ExperimentConfig cfg = tiny_config(Algorithm::bbo);
    const CampaignReport a = run_campaign(cfg);
    const CampaignReport b = run_campaign(cfg);
    REQUIRE(render(campaign_csv(a)) == render(campaign_csv(b)));
    REQUIRE(render(trajectory_stat_csv(a, "z")) == render(trajectory_stat_csv(b, "z")));
    for (std::size_t t = 0; t < a.trials.size(); ++t) {
        REQUIRE(a.trials[t].best_genes == b.trials[t].best_genes);
    }
}

TEST_CASE("trial seeds derive from the master seed and index") {
    ExperimentConfig cfg = tiny_config(Algorithm::bbo);
    const CampaignReport ten = run_campaign(cfg);
    cfg.trials = 1;
    const CampaignReport one = run_campaign(cfg);
    REQUIRE(one.trials[0].final_metric == ten.trials[0].final_metric);
    REQUIRE(one.trials[0].best_genes == ten.trials[0].best_genes);
}

TEST_CASE("multi-objective campaigns summarize hypervolume") {
    const CampaignReport report = run_campaign(tiny_config(Algorithm::nsbbo));
    REQUIRE(report.trials.size() == 2);
    for (const auto& t : report.trials) {
        REQUIRE_FALSE(t.front.empty());
        REQUIRE(t.final_metric == normalized_hypervolume(t.front));
        REQUIRE(testutil::is_antichain(t.front, true));
    }
    REQUIRE(report.traj_times.empty());
}

TEST_CASE("representative trial is the lower median by metric") {
    CampaignReport report;
    for (double v : {3.0, 1.0, 2.0}) {
        TrialReport t;
        t.final_metric = v;
        report.trials.push_back(t);
    }
    REQUIRE(representative_trial(report) == 2);
}

TEST_CASE("single-value sweep equals the plain campaign") {
    ExperimentConfig cfg = tiny_config(Algorithm::bbo);
    cfg.bbo.population = 6;
    cfg.pso.population = 6;
    const CampaignReport direct = run_campaign(cfg);
    const SweepResult sweep = sensitivity_sweep(cfg, "population", {"6"});
    REQUIRE(sweep.rows.size() == 1);
    REQUIRE(sweep.rows[0].mean_metric == direct.mean_metric);
    REQUIRE(sweep.rows[0].std_metric == direct.std_metric);
}

TEST_CASE("sweep covers every documented axis and rejects others") {
    ExperimentConfig cfg = tiny_config(Algorithm::pso);
    cfg.trials = 1;
    REQUIRE(sensitivity_sweep(cfg, "w", {"0.5", "-0.2"}).rows.size() == 2);
    REQUIRE(sensitivity_sweep(cfg, "c1", {"1"}).rows.size() == 1);
    REQUIRE(sensitivity_sweep(cfg, "c2", {"3"}).rows.size() == 1);
    ExperimentConfig bcfg = tiny_config(Algorithm::bbo);
    bcfg.trials = 1;
    const SweepResult em = sensitivity_sweep(bcfg, "emigration", {"linear", "sinusoidal"});
    REQUIRE(em.rows[0].value == "linear");
    REQUIRE_THROWS_AS(sensitivity_sweep(cfg, "velocity", {"1"}), std::invalid_argument);
    REQUIRE_THROWS_AS(sensitivity_sweep(bcfg, "emigration", {"triangular"}),
                      std::invalid_argument);
}

TEST_CASE("timing rows agree on every number") {
    ExperimentConfig cfg = tiny_config(Algorithm::bbo);
    cfg.trials = 1;
    const auto rows = timing_comparison(cfg, {1, 2});
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].mean_metric == rows[1].mean_metric);
    REQUIRE(rows[0].seconds > 0.0);
    REQUIRE(rows[1].seconds > 0.0);
    REQUIRE_THROWS_AS(timing_comparison(cfg, {}), std::invalid_argument);
}

TEST_CASE("front comparison of identical fronts covers fully both ways") {
    Individual a;
    a.objectives = {1.0, 2.0};
    a.genes = Genes(8, 0.0);
    Individual b;
    b.objectives = {2.0, 1.0};
    b.genes = Genes(8, 0.0);
    const ParetoFront front = ParetoFront::from_members({a, b});
    const FrontComparison cmp = compare_fronts({{"first", front}, {"second", front}});
    REQUIRE(cmp.coverage[0][1] == 2);
    REQUIRE(cmp.coverage[1][0] == 2);
    REQUIRE(cmp.union_dominated == std::vector<std::size_t>{2, 2});
    REQUIRE(cmp.hypervolume[0] == cmp.hypervolume[1]);
}

TEST_CASE("a strictly better front covers one way only") {
    Individual best;
    best.objectives = {0.0, 0.0};
    Individual worse;
    worse.objectives = {1.0, 1.0};
    const ParetoFront a = ParetoFront::from_members({best});
    const ParetoFront b = ParetoFront::from_members({worse});
    const FrontComparison cmp = compare_fronts({{"a", a}, {"b", b}});
    REQUIRE(cmp.coverage[0][1] == 1);
    REQUIRE(cmp.coverage[1][0] == 0);
    REQUIRE(cmp.union_dominated == std::vector<std::size_t>{0, 1});
    REQUIRE_THROWS_AS(compare_fronts({{"a", a}}), std::invalid_argument);
}

TEST_CASE("campaign csv round-trips through the parser") {
    const CampaignReport report = run_campaign(tiny_config(Algorithm::bbo));
    const CsvTable table = campaign_csv(report);
    std::stringstream ss(render(table));
    const CsvTable parsed = read_csv(ss);
    REQUIRE(parsed.header == table.header);
    REQUIRE(parsed.rows == table.rows);
    REQUIRE(render(parsed) == render(table));
}

TEST_CASE("front csv round-trips into the same front") {
    const CampaignReport report = run_campaign(tiny_config(Algorithm::vebbo));
    const ParetoFront& front = report.trials[0].front;
    const CsvTable table = front_csv(front);
    const ParetoFront back = read_front_csv(table);
    REQUIRE(back.size() == front.size());
    for (std::size_t i = 0; i < front.size(); ++i) {
        REQUIRE(back.members()[i].objectives == front.members()[i].objectives);
        REQUIRE(back.members()[i].genes == front.members()[i].genes);
    }
}

TEST_CASE("metrics csv covers all record kinds") {
    Individual m;
    m.objectives = {1.0, 1.0};
    const ParetoFront front = ParetoFront::from_members({m});
    const FrontComparison cmp = compare_fronts({{"a", front}, {"b", front}});
    const CsvTable table = metrics_csv(cmp);
    REQUIRE(table.header.size() == 7);
    REQUIRE(table.rows.size() == 2 + 2 + 2);
    REQUIRE(table.rows[0][0] == "coverage");
    REQUIRE(table.rows[2][0] == "hypervolume");
    REQUIRE(table.rows[4][0] == "domination");
}

TEST_CASE("trajectory statistics tables are consistent") {
    const CampaignReport report = run_campaign(tiny_config(Algorithm::pso));
    const CsvTable z = trajectory_stat_csv(report, "z");
    REQUIRE(z.header == std::vector<std::string>{"t", "mean", "std"});
    REQUIRE(z.rows.size() == report.traj_times.size());
    const CsvTable thrust = trajectory_stat_csv(report, "thrust");
    REQUIRE(thrust.header.size() == 4);
    REQUIRE(thrust.header[3] == "log10_mean");
    REQUIRE(parse_double(thrust.rows[0][3]) ==
            std::log10(parse_double(thrust.rows[0][1])));
    REQUIRE_THROWS_AS(trajectory_stat_csv(report, "yaw"), std::invalid_argument);
}

TEST_CASE("default config writes and parses back identically") {
    ExperimentConfig cfg;
    cfg.pso.v_max = std::vector<double>(8, 0.5);
    std::stringstream first;
    write_config(cfg, first);
    const ExperimentConfig parsed = parse_config(first);
    std::stringstream second;
    write_config(parsed, second);
    REQUIRE(first.str() == second.str());
    REQUIRE(parsed.pso.v_max.has_value());
    REQUIRE(parsed.pso.v_max->size() == 8);
}

TEST_CASE("config parser rejects unknown keys with a location") {
    std::stringstream bad("[pso]\npopulation = 10\nfoo = 1\n");
    try {
        parse_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("line 3") != std::string::npos);
        REQUIRE(msg.find("foo") != std::string::npos);
    }
}

TEST_CASE("config parser rejects unknown sections and malformed lines") {
    std::stringstream bad_section("[warp]\nspeed = 9\n");
    REQUIRE_THROWS_AS(parse_config(bad_section), ConfigError);
    std::stringstream no_equals("[pso]\npopulation 10\n");
    REQUIRE_THROWS_AS(parse_config(no_equals), ConfigError);
    std::stringstream orphan("population = 10\n");
    REQUIRE_THROWS_AS(parse_config(orphan), ConfigError);
    std::stringstream bad_value("[pso]\npopulation = many\n");
    REQUIRE_THROWS_AS(parse_config(bad_value), ConfigError);
    std::stringstream bad_alg("[experiment]\nalgorithm = annealing\n");
    REQUIRE_THROWS_AS(parse_config(bad_alg), ConfigError);
}

TEST_CASE("config accepts comments and reads values back") {
    std::stringstream text("# tuned down for a quick run\n"
                           "[experiment]\n"
                           "algorithm = nspso # trailing comment\n"
                           "trials = 3\n"
                           "[simulation]\n"
                           "t_final = 2.5\n"
                           "[bounds]\n"
                           "kp_phi_max = 15\n");
    const ExperimentConfig cfg = parse_config(text);
    REQUIRE(cfg.algorithm == Algorithm::nspso);
    REQUIRE(cfg.trials == 3);
    REQUIRE(cfg.t_final == 2.5);
    REQUIRE(cfg.bounds.upper[0] == 15.0);
    REQUIRE(cfg.bounds.upper[1] == 10.0);
}

TEST_CASE("experiment config validation catches bad field combinations") {
    ExperimentConfig cfg;
    cfg.trials = 0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.t_final = 0.001;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.weights.values = {1.0, 1.0};
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.drone.m = -1.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::exception);
}

TEST_CASE("baseline cost is reproducible and positive") {
    const ExperimentConfig cfg;
    const double c1 = baseline_cost(cfg);
    const double c2 = baseline_cost(cfg);
    REQUIRE(c1 == c2);
    REQUIRE(c1 > 0.0);
    REQUIRE(std::isfinite(c1));
}
