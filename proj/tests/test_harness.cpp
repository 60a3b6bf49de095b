#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tailproc/harness.hpp"

using namespace tailproc;

namespace {

ExperimentConfig small_hill_config() {
    ExperimentConfig cfg{ArSpec({0.0}, InnovationDist::Pareto(2.0), 2.0)};
    cfg.n = 2000;
    cfg.threshold = ThresholdSpec::OrderStat(100);
    cfg.statistic = StatisticKind::hill;
    cfg.replications = 40;
    cfg.master_seed = 777;
    cfg.pilot_multiplier = 10.0;
    return cfg;
}

void require_identical(const McReport& a, const McReport& b) {
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        REQUIRE(a.records[i].seed == b.records[i].seed);
        REQUIRE(a.records[i].estimate == b.records[i].estimate);
        REQUIRE(a.records[i].deviation == b.records[i].deviation);
    }
    REQUIRE(a.center == b.center);
    REQUIRE(a.mean == b.mean);
    REQUIRE(a.variance == b.variance);
    REQUIRE(a.jb_statistic == b.jb_statistic);
}

}  // namespace

TEST_CASE("identical configs give bit-identical reports") {
    const ExperimentConfig cfg = small_hill_config();
    const McReport a = run_experiment(cfg);
    const McReport b = run_experiment(cfg);
    require_identical(a, b);
}

TEST_CASE("worker count does not change the report") {
    const ExperimentConfig cfg = small_hill_config();
    const McReport serial = run_experiment(cfg, 1);
    const McReport threaded = run_experiment(cfg, 3);
    require_identical(serial, threaded);
}

TEST_CASE("a single replication can be reproduced from its seed") {
    const ExperimentConfig cfg = small_hill_config();
    const McReport rep = run_experiment(cfg);
    const std::size_t i = 17;
    REQUIRE(rep.records[i].seed == replication_seed(cfg.master_seed, i));
    const PathSample path = simulate(cfg.model, cfg.n, rep.records[i].seed);
    const double est = hill(path.values, cfg.threshold.k).value;
    CHECK(est == rep.records[i].estimate);
}

TEST_CASE("aggregation is stable under record reordering") {
    const ExperimentConfig cfg = small_hill_config();
    const McReport rep = run_experiment(cfg);
    std::vector<ReplicationRecord> reversed(rep.records.rbegin(), rep.records.rend());
    const McReport again = aggregate_report(std::move(reversed), rep.center, rep.norm_factor,
                                            cfg.theory_target, cfg.tolerance_rel,
                                            cfg.master_seed);
    CHECK(again.mean == Catch::Approx(rep.mean).margin(1e-12));
    CHECK(again.variance == Catch::Approx(rep.variance).margin(1e-12));
    CHECK(again.failures == rep.failures);
}

TEST_CASE("different master seeds give different draws") {
    ExperimentConfig cfg = small_hill_config();
    const McReport a = run_experiment(cfg);
    cfg.master_seed = 778;
    const McReport b = run_experiment(cfg);
    CHECK(a.records[0].estimate != b.records[0].estimate);
}

TEST_CASE("pilot and replication seed streams never collide") {
    const std::uint64_t master = 777;
    for (std::size_t i = 0; i < 1000; ++i)
        REQUIRE(replication_seed(master, i) != pilot_seed(master));
}

TEST_CASE("sweep over a single k matches run_experiment") {
    const ExperimentConfig cfg = small_hill_config();
    const std::vector<std::size_t> grid = {cfg.threshold.k};
    const std::vector<McReport> sweep = sweep_k(cfg, grid);
    REQUIRE(sweep.size() == 1);
    require_identical(sweep[0], run_experiment(cfg));
}

TEST_CASE("sweep cells use distinct derived seeds") {
    ExperimentConfig cfg = small_hill_config();
    const std::vector<std::size_t> grid = {50, 100, 200};
    const std::vector<McReport> sweep = sweep_k(cfg, grid);
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0].master_seed != sweep[1].master_seed);
    CHECK(sweep[1].master_seed != sweep[2].master_seed);
    // Deterministic: rerun matches.
    const std::vector<McReport> again = sweep_k(cfg, grid);
    for (std::size_t i = 0; i < 3; ++i) require_identical(sweep[i], again[i]);
}

TEST_CASE("failure budget aborts when too many replications fail") {
    ExperimentConfig cfg = small_hill_config();
    // cte with k > n - 1 - h fails in every replication but not in the pilot.
    cfg.n = 50;
    cfg.h = 10;
    cfg.threshold = ThresholdSpec::OrderStat(45);
    cfg.statistic = StatisticKind::cte;
    CHECK_THROWS_AS(run_experiment(cfg), estimator_error);
}

TEST_CASE("theory target gates the report") {
    ExperimentConfig cfg = small_hill_config();
    cfg.replications = 60;
    cfg.theory_target = 0.25;  // iid Pareto(2) Hill limit variance
    cfg.tolerance_rel = 0.5;
    const McReport rep = run_experiment(cfg);
    CHECK(rep.theory_target.has_value());
    CHECK(rep.within_tolerance);
    cfg.theory_target = 100.0;
    const McReport bad = run_experiment(cfg);
    CHECK_FALSE(bad.within_tolerance);
}

TEST_CASE("mc moments look sane for iid hill") {
    ExperimentConfig cfg = small_hill_config();
    cfg.replications = 100;
    const McReport rep = run_experiment(cfg);
    CHECK(rep.failures == 0);
    CHECK(rep.variance > 0.05);
    CHECK(rep.variance < 1.0);
    CHECK(std::abs(rep.mean) < 1.0);
}

TEST_CASE("counterexample experiment is deterministic across workers") {
    const RenewalChainSpec spec(3.0);
    const std::vector<double> s = {1.0, 2.0};
    const CounterexampleReport a =
        counterexample_experiment(spec, 5000, 0.2, s, 30, 99, 1, 10.0);
    const CounterexampleReport b =
        counterexample_experiment(spec, 5000, 0.2, s, 30, 99, 3, 10.0);
    REQUIRE(a.deviations.size() == b.deviations.size());
    for (std::size_t r = 0; r < a.deviations.size(); ++r)
        for (std::size_t j = 0; j < s.size(); ++j)
            REQUIRE(a.deviations[r][j] == b.deviations[r][j]);
    CHECK(a.covariance_01 == b.covariance_01);
}

TEST_CASE("counterexample regime classification") {
    const std::vector<double> s = {1.0};
    const CounterexampleReport g =
        counterexample_experiment(RenewalChainSpec(3.0), 5000, 0.2, s, 10, 1, 1, 5.0);
    CHECK(g.regime == CounterexampleRegime::gaussian);
    CHECK(std::string(g.regime_name()) == "gaussian");

    // The stable branch fits a Hill tail index across replications, which
    // needs more than a handful of them.
    const CounterexampleReport st =
        counterexample_experiment(RenewalChainSpec(1.5), 5000, 0.2, s, 40, 1, 1, 5.0);
    CHECK(st.regime == CounterexampleRegime::stable);

    // u = n^{0.9}, beta = 1.5: n F_Z_bar(u) = n u^{-1.5} -> 0.
    const CounterexampleReport d =
        counterexample_experiment(RenewalChainSpec(1.5), 5000, 0.9, s, 10, 1, 1, 5.0);
    CHECK(d.regime == CounterexampleRegime::degenerate);
    CHECK(d.n_fz < 1.0);
    CHECK(d.exceedance_fraction <= 1.0);
}
