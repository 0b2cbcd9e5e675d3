#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ctrw/errors.hpp"
#include "ctrw/master_scheme.hpp"

using namespace ctrw;

namespace {

SpectralMeasure cauchy_rho() { return make_atomic_measure({{1.0, 1.0}}); }

// plain convolution oracle for the beta = 1 reduction
std::vector<double> convolve_reference(const std::vector<double>& p, int K,
                                       const std::vector<double>& u, int J) {
    std::vector<double> out(u.size(), 0.0);
    const int W = 2 * J;
    for (int j = 0; j <= W; ++j) {
        double acc = 0.0;
        for (int k = -K; k <= K; ++k) {
            const int src = j - k;
            if (src < 0 || src > W) continue;
            acc += p[static_cast<size_t>(k + K)] * u[static_cast<size_t>(src)];
        }
        out[static_cast<size_t>(j)] = acc;
    }
    return out;
}

} // namespace

TEST_CASE("initial grid is the discrete delta") {
    const auto g1 = init_grid(1, 0.1, 0.01, 100);
    CHECK(g1.layer_count() == 1);
    CHECK(g1.value_at(0, 0) == 1.0);
    CHECK(g1.mass(0) == 1.0);
    CHECK(g1.boundary_mass_lost() == 0.0);
    double nonzero = 0.0;
    for (const double v : g1.layer(0)) nonzero += (v != 0.0);
    CHECK(nonzero == 1.0);

    const auto g2 = init_grid(2, 0.1, 0.01, 20);
    CHECK(g2.value_at(0, 0, 0) == 1.0);
    CHECK(g2.mass(0) == 1.0);
}

TEST_CASE("first step conserves mass for every beta") {
    const auto rho = cauchy_rho();
    for (double beta : {0.3, 0.5, 0.8, 1.0}) {
        const double h = 0.5;
        const double tau = 0.8 * stability_bound(rho, 1, h, 64, beta);
        const auto table = beta < 1.0 ? gl_coefficients(beta, 8, tau)
                                      : gl_coefficients(1.0, 8, tau);
        const auto kernel = build_kernel(rho, 1, h, table, 64);
        auto grid = init_grid(1, h, tau, 80);
        step(grid, table, kernel);
        CHECK(grid.layer_count() == 2);
        CHECK(grid.conservation_defect(1) <= 1e-14);
        // mixture of the delta and one jump round
        CHECK(grid.value_at(1, 0) >= table.memory_weight(0));
    }
}

TEST_CASE("beta = 1 run equals plain convolution iterates") {
    const auto rho = cauchy_rho();
    const double h = 0.5;
    const int K = 32;
    const double tau = 0.8 * stability_bound(rho, 1, h, K, 1.0);
    const auto table = gl_coefficients(1.0, 12, tau);
    const auto kernel = build_kernel(rho, 1, h, table, K);
    const int J = 12 * K + 4; // no boundary contact
    auto grid = init_grid(1, h, tau, J);
    run(grid, table, kernel, 12);
    CHECK(grid.boundary_mass_lost() == 0.0);

    std::vector<double> u(static_cast<size_t>(2 * J) + 1, 0.0);
    u[static_cast<size_t>(J)] = 1.0;
    for (int n = 1; n <= 12; ++n) {
        u = convolve_reference(kernel.box(), K, u, J);
        const auto layer = grid.layer(n);
        double worst = 0.0;
        for (size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::fabs(u[i] - layer[i]));
        CHECK(worst <= 1e-14);
    }
}

TEST_CASE("conservation, positivity and symmetry over longer runs") {
    const auto rho = make_atomic_measure({{0.7, 0.4}, {1.4, 0.6}});
    for (double beta : {0.5, 1.0}) {
        const double h = 0.5;
        const double tau = 0.9 * stability_bound(rho, 1, h, 48, beta);
        const auto table = gl_coefficients(beta, 60, tau);
        const auto kernel = build_kernel(rho, 1, h, table, 48);
        auto grid = init_grid(1, h, tau, 120);
        run(grid, table, kernel, 60);
        CHECK(grid.max_conservation_defect() <= 1e-12);
        CHECK(grid.boundary_mass_lost() > 0.0);
        for (int n = 0; n <= 60; n += 10) {
            const auto layer = grid.layer(n);
            double min_v = 0.0;
            for (const double v : layer) min_v = std::min(min_v, v);
            CHECK(min_v >= 0.0);
            for (int j = 1; j <= 120; j += 17) {
                CHECK(grid.value_at(n, j) == grid.value_at(n, -j));
            }
        }
    }
}

TEST_CASE("two-dimensional step conserves") {
    const auto rho = cauchy_rho();
    const double h = 0.5;
    const double tau = 0.9 * stability_bound(rho, 2, h, 12, 0.5);
    const auto table = gl_coefficients(0.5, 10, tau);
    const auto kernel = build_kernel(rho, 2, h, table, 12);
    auto grid = init_grid(2, h, tau, 25);
    run(grid, table, kernel, 10);
    CHECK(grid.max_conservation_defect() <= 1e-12);
    CHECK(grid.boundary_mass_lost() > 0.0);
    // inversion symmetry is exact by the paired summation; the axis swap
    // changes the summation order, so it holds only to rounding
    CHECK(grid.value_at(10, 3, 4) == grid.value_at(10, -3, -4));
    CHECK(grid.value_at(10, 3, 4) ==
          doctest::Approx(grid.value_at(10, 4, 3)).epsilon(1e-13));
}

TEST_CASE("three-dimensional step conserves") {
    const auto rho = cauchy_rho();
    const double h = 1.0;
    const double tau = 0.9 * stability_bound(rho, 3, h, 8, 1.0);
    const auto table = gl_coefficients(1.0, 3, tau);
    const auto kernel = build_kernel(rho, 3, h, table, 8);
    auto grid = init_grid(3, h, tau, 10);
    run(grid, table, kernel, 3);
    CHECK(grid.max_conservation_defect() <= 1e-12);
}

TEST_CASE("stability violation refuses to step") {
    const auto rho = cauchy_rho();
    const double h = 0.5;
    const double tau_max = stability_bound(rho, 1, h, 64, 0.5);
    const auto table = gl_coefficients(0.5, 8, 1.05 * tau_max);
    const auto kernel = build_kernel(rho, 1, h, table, 64);
    auto grid = init_grid(1, h, 1.05 * tau_max, 50);
    CHECK_THROWS_AS(step(grid, table, kernel), StabilityViolation);
    CHECK(grid.layer_count() == 1); // nothing was produced
}

TEST_CASE("horizon exhaustion raises") {
    // a horizon-3 table supports steps n = 0..3 (it holds c_2, c_3, gamma_3);
    // the fifth step needs c_4
    const auto rho = cauchy_rho();
    const double tau = 0.5 * stability_bound(rho, 1, 0.5, 32, 0.5);
    const auto table = gl_coefficients(0.5, 3, tau);
    const auto kernel = build_kernel(rho, 1, 0.5, table, 32);
    auto grid = init_grid(1, 0.5, tau, 200);
    run(grid, table, kernel, 4);
    CHECK_THROWS_AS(step(grid, table, kernel), HistoryMissing);
}

TEST_CASE("mismatched kernel and table raise") {
    const auto rho = cauchy_rho();
    const auto table = gl_coefficients(0.5, 4, 0.01);
    const auto kernel = build_kernel(rho, 1, 0.5, 0.02, 0.5, 32);
    auto grid = init_grid(1, 0.5, 0.01, 50);
    CHECK_THROWS_AS(step(grid, table, kernel), std::invalid_argument);
}

TEST_CASE("run with zero steps is the identity") {
    const auto rho = cauchy_rho();
    const auto table = gl_coefficients(0.5, 4, 0.01);
    const auto kernel = build_kernel(rho, 1, 0.5, table, 32);
    auto grid = init_grid(1, 0.5, 0.01, 50);
    run(grid, table, kernel, 0);
    CHECK(grid.layer_count() == 1);
}

TEST_CASE("grid cf basics") {
    const auto rho = cauchy_rho();
    const double h = 0.5;
    const double tau = 0.9 * stability_bound(rho, 1, h, 32, 0.5);
    const auto table = gl_coefficients(0.5, 20, tau);
    const auto kernel = build_kernel(rho, 1, h, table, 32);
    auto grid = init_grid(1, h, tau, 700); // loss-free for 20 steps
    run(grid, table, kernel, 20);
    REQUIRE(grid.boundary_mass_lost() == 0.0);
    const auto at0 = grid_cf(grid, 20, 0.0);
    CHECK(at0.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(at0.imag()) == 0.0);
    const auto at1 = grid_cf(grid, 20, 1.3);
    CHECK(std::fabs(at1.imag()) <= 1e-12); // symmetric layer
}

TEST_CASE("characteristic function recursion matches the grid run exactly") {
    // with a loss-free window the grid cf obeys
    // u_hat^{n+1} = gamma~_n + sum c_m u_hat^{n+1-m} + q_hat u_hat^n
    const auto rho = make_atomic_measure({{0.8, 0.5}, {1.5, 0.5}});
    const double h = 0.4;
    const int K = 16;
    const int steps = 25;
    const double tau = 0.9 * stability_bound(rho, 1, h, K, 0.6);
    const auto table = gl_coefficients(0.6, steps, tau);
    const auto kernel = build_kernel(rho, 1, h, table, K);
    auto grid = init_grid(1, h, tau, steps * K + 2);
    run(grid, table, kernel, steps);
    REQUIRE(grid.boundary_mass_lost() == 0.0);
    for (double xi : {0.5, 1.0, 3.0}) {
        const auto seq = cf_recursion(table, kernel.q_hat(xi), steps);
        for (int n = 0; n <= steps; n += 5) {
            CHECK(grid_cf(grid, n, xi).real() ==
                  doctest::Approx(seq[static_cast<size_t>(n)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("boundary loss accounting is honest under heavy clipping") {
    // tiny window so that mass drains quickly; the ledger must still balance
    const auto rho = make_atomic_measure({{0.5, 1.0}});
    const double h = 0.5;
    const double tau = 0.9 * stability_bound(rho, 1, h, 64, 0.5);
    const auto table = gl_coefficients(0.5, 40, tau);
    const auto kernel = build_kernel(rho, 1, h, table, 64);
    auto grid = init_grid(1, h, tau, 5);
    run(grid, table, kernel, 40);
    CHECK(grid.boundary_mass_lost() > 0.05);
    CHECK(grid.max_conservation_defect() <= 1e-12);
}
