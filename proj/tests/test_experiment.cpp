#include <doctest.h>

#include <cmath>

#include "ctrw/errors.hpp"
#include "ctrw/experiment.hpp"

using namespace ctrw;

namespace {

ExperimentConfig base_config() {
    ExperimentConfig cfg;
    cfg.rho = make_atomic_measure({{1.0, 1.0}});
    cfg.beta = 1.0;
    cfg.h_list = {0.4, 0.2};
    cfg.xi_probes = {0.5, 1.0};
    cfg.t_final = 0.5;
    cfg.trunc_K = 512;
    cfg.window_phys = 40.0;
    return cfg;
}

} // namespace

TEST_CASE("config validation") {
    auto cfg = base_config();
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.xi_probes.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.h_list = {0.2, 0.4};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.rho.reset();
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.tau_fraction = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.mu = make_atomic_time_measure({{0.5, 0.7}}); // not a probability measure
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("convergence study: beta = 1 errors decrease") {
    auto cfg = base_config();
    const auto rep = run_convergence(cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.errors_monotone);
    CHECK(rep.rows[1].sup_cf_err < rep.rows[0].sup_cf_err);
    for (const auto& row : rep.rows) {
        CHECK(row.mass_defect <= 1e-12);
        CHECK(row.q0 >= 0.0);
        CHECK(row.tau <= row.tau_max * (1.0 + 1e-12));
    }
}

TEST_CASE("convergence study: beta = 1/2 errors decrease") {
    auto cfg = base_config();
    cfg.beta = 0.5;
    cfg.h_list = {0.5, 0.25};
    const auto rep = run_convergence(cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[1].sup_cf_err < rep.rows[0].sup_cf_err);
}

TEST_CASE("monte carlo row is attached at the finest level") {
    auto cfg = base_config();
    cfg.beta = 0.5;
    cfg.h_list = {0.5};
    cfg.n_walkers = 20000;
    const auto rep = run_convergence(cfg);
    REQUIRE(rep.mc_rows.size() == 1);
    CHECK(rep.mc_rows[0].sup_ecf_vs_grid <= rep.mc_rows[0].envelope);
}

TEST_CASE("report serialization carries the schema header") {
    auto cfg = base_config();
    const auto rep = run_convergence(cfg);
    CHECK(rep.to_json().find("ctrw-report/1") != std::string::npos);
    CHECK(rep.rows_csv().find("h,tau,n_steps") != std::string::npos);
}

TEST_CASE("reports are reproducible") {
    auto cfg = base_config();
    cfg.beta = 0.5;
    cfg.h_list = {0.5};
    cfg.n_walkers = 5000;
    const auto a = run_convergence(cfg);
    const auto b = run_convergence(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].sup_cf_err == b.rows[i].sup_cf_err);
        CHECK(a.rows[i].boundary_loss == b.rows[i].boundary_loss);
    }
    REQUIRE(a.mc_rows.size() == 1);
    CHECK(a.mc_rows[0].sup_ecf_vs_grid == b.mc_rows[0].sup_ecf_vs_grid);
}

TEST_CASE("theorem2 study against the closed-form density") {
    auto cfg = base_config();
    cfg.tau_fraction = 0.2;
    cfg.h_list = {0.4, 0.2};
    cfg.t_final = 1.0;
    cfg.x_window = 8.0;
    cfg.window_phys = 60.0;
    cfg.trunc_K = 1024;
    const auto rep = run_theorem2(cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[1].sup_cf_err < rep.rows[0].sup_cf_err);
    CHECK(rep.rows[1].sup_cf_err < 0.05);
    CHECK(rep.rows[1].l1_err < rep.rows[0].l1_err);
}

TEST_CASE("theorem2 rejects sigma above one and non-unit beta") {
    auto cfg = base_config();
    cfg.tau_fraction = 0.9; // sigma = 2 * 0.9 > 1
    CHECK_THROWS_AS((void)run_theorem2(cfg), StabilityViolation);
    cfg.tau_fraction = 0.2;
    cfg.beta = 0.5;
    CHECK_THROWS_AS((void)run_theorem2(cfg), ConfigError);
}

TEST_CASE("distributed-order point mass reduces to the single-order study") {
    auto cfg = base_config();
    cfg.beta = 0.5;
    cfg.h_list = {0.5, 0.25};
    const auto direct = run_convergence(cfg);

    auto dcfg = cfg;
    dcfg.mu = make_atomic_time_measure({{0.5, 1.0}});
    const auto dist = run_distributed_order(dcfg);
    REQUIRE(dist.rows.size() == direct.rows.size());
    for (size_t i = 0; i < dist.rows.size(); ++i) {
        CHECK(std::fabs(dist.rows[i].sup_cf_err - direct.rows[i].sup_cf_err) <= 1e-12);
        CHECK(dist.rows[i].tau == direct.rows[i].tau);
    }
}

TEST_CASE("distributed-order mixture cross-validates scheme against MC") {
    auto cfg = base_config();
    cfg.mu = make_atomic_time_measure({{0.4, 0.5}, {0.8, 0.5}});
    cfg.h_list = {0.5};
    cfg.n_walkers = 20000;
    const auto rep = run_distributed_order(cfg);
    CHECK(rep.mode == "distorder");
    CHECK(!rep.notes.empty());
    REQUIRE(rep.rows.size() == 1);
    CHECK(std::isnan(rep.rows[0].sup_cf_err)); // no exact oracle for mixtures
    REQUIRE(rep.mc_rows.size() == 1);
    CHECK(rep.mc_rows[0].sup_ecf_vs_grid <= rep.mc_rows[0].envelope);
    CHECK(std::isnan(rep.mc_rows[0].sup_ecf_vs_exact));
}
