#include <doctest.h>

#include <cmath>
#include <vector>

#include "ctrw/errors.hpp"
#include "ctrw/master_scheme.hpp"
#include "ctrw/spectral_reference.hpp"

using namespace ctrw;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> uniform_grid(double dx, int half) {
    std::vector<double> x(static_cast<size_t>(2 * half) + 1);
    for (int i = -half; i <= half; ++i) x[static_cast<size_t>(i + half)] = i * dx;
    return x;
}

// composite Gauss-Legendre oracle: fixed panels short enough to hold at
// most one oscillation period, 16 nodes each
template <class F>
double integrate(const F& f, double a, double b, double panel_width) {
    std::vector<double> xn, wn;
    ctrw::detail::gauss_legendre(16, xn, wn);
    const int panels = static_cast<int>(std::ceil((b - a) / panel_width));
    const double dw = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * dw;
        for (int i = 0; i < 16; ++i) {
            acc += 0.5 * dw * wn[static_cast<size_t>(i)] *
                   f(mid + 0.5 * dw * xn[static_cast<size_t>(i)]);
        }
    }
    return acc;
}

} // namespace

TEST_CASE("exact cf values") {
    const auto rho = make_atomic_measure({{1.0, 1.0}});
    CHECK(exact_cf(rho, 0.7, 2.0, 0.0) == 1.0);
    CHECK(exact_cf(rho, 1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    const double erfc_oracle = std::exp(1.0) * std::erfc(1.0);
    CHECK(exact_cf(rho, 0.5, 1.0, 1.0) == doctest::Approx(erfc_oracle).epsilon(1e-8));
}

TEST_CASE("exact cf decreases in t for fixed frequency") {
    const auto rho = make_atomic_measure({{0.8, 0.5}, {1.6, 0.5}});
    for (double beta : {0.4, 0.8, 1.0}) {
        double prev = 2.0;
        for (double t = 0.25; t <= 4.0; t += 0.25) {
            const double v = exact_cf(rho, beta, t, 1.0);
            CHECK(v < prev);
            CHECK(v > 0.0);
            prev = v;
        }
    }
}

TEST_CASE("green function reproduces the cauchy density") {
    const auto rho = make_atomic_measure({{1.0, 1.0}});
    // full-period grid: trapezoid mass telescopes to the cf at zero
    const auto x = uniform_grid(0.1, 2048);
    const auto g = green_function_beta1(rho, 1.0, x);
    const auto at = [&](double xv) {
        return g[static_cast<size_t>(std::lround(xv / 0.1) + 2048)];
    };
    CHECK(at(0.0) == doctest::Approx(1.0 / kPi).epsilon(5e-4));
    CHECK(at(1.0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(5e-4));
    // symmetry and mass
    double mass = 0.0;
    double min_v = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        min_v = std::min(min_v, g[i]);
        const double w = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
        mass += w * g[i] * 0.1;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(min_v >= -1e-9);
    for (int j = 1; j <= 2048; j += 97) {
        CHECK(g[static_cast<size_t>(2048 + j)] ==
              doctest::Approx(g[static_cast<size_t>(2048 - j)]).epsilon(1e-12));
    }
}

TEST_CASE("green function rejects an under-resolved grid") {
    const auto rho = make_atomic_measure({{1.0, 1.0}});
    const auto x = uniform_grid(0.5, 64); // e^{-pi/0.5} is far above 1e-12
    CHECK_THROWS_AS((void)green_function_beta1(rho, 1.0, x), AliasingError);
}

TEST_CASE("fractional density: beta = 1 reduction and mass") {
    const auto rho = make_atomic_measure({{1.6, 1.0}});
    const auto x = uniform_grid(0.05, 4096);
    const auto a = green_function_beta1(rho, 1.0, x);
    const auto b = frac_density(rho, 1.0, 1.0, x);
    for (size_t i = 0; i < a.size(); i += 53) {
        CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-10));
    }
    // E_beta decays only algebraically, so the default cutoff gate cannot
    // pass on this grid; the loosened gate keeps the inversion truncated
    // but the periodic trapezoid mass still telescopes to the CF at zero
    FftConfig loose;
    loose.min_modes = 4096;
    loose.max_cf_at_cutoff = 1e-2;
    const auto frac = frac_density(rho, 0.5, 1.0, x, loose);
    double mass = 0.0;
    for (size_t i = 0; i < frac.size(); ++i) {
        const double w = (i == 0 || i + 1 == frac.size()) ? 0.5 : 1.0;
        mass += w * frac[i] * 0.05;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
    for (int j = 1; j <= 4096; j += 211) {
        CHECK(frac[static_cast<size_t>(4096 + j)] ==
              doctest::Approx(frac[static_cast<size_t>(4096 - j)]).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)frac_density(rho, 0.5, 1.0, x), AliasingError);
}

TEST_CASE("fractional density against a direct quadrature of the inversion") {
    // same truncated transform on both routes; the oracle integrates
    // (1/pi) Int_0^{xi_max} E_beta(psi(xi) t^beta) cos(x xi) dxi directly
    const auto rho = make_atomic_measure({{1.0, 1.0}});
    const double dx = 0.005;
    const auto x = uniform_grid(dx, 1000);
    FftConfig cfg;
    cfg.min_modes = 1 << 17;
    cfg.max_cf_at_cutoff = 1e-3;
    const auto dens = frac_density(rho, 0.5, 1.0, x, cfg);
    const double xi_max = kPi / dx;
    auto transform = [&](double xi) { return exact_cf(rho, 0.5, 1.0, xi); };
    for (double xv : {0.0, 1.0}) {
        auto f = [&](double xi) { return transform(xi) * std::cos(xv * xi) / kPi; };
        const double oracle = integrate(f, 0.0, xi_max, 2.0);
        const double got = dens[static_cast<size_t>(std::lround(xv / dx) + 1000)];
        CHECK(std::fabs(got - oracle) <= 2e-5);
    }
}

TEST_CASE("laplace symbol") {
    CHECK(laplace_symbol(0.7, 0.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(laplace_symbol(1.0, -1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(laplace_symbol(0.5, -1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    // beta = 1: resolvent 1/(s - psi)
    for (double s : {0.5, 1.0, 3.0}) {
        for (double psi : {-0.2, -1.0, -4.0}) {
            CHECK(laplace_symbol(1.0, psi, s) ==
                  doctest::Approx(1.0 / (s - psi)).epsilon(1e-13));
        }
    }
}

TEST_CASE("discrete laplace transform of constant layers") {
    // u_hat == 1: the sum telescopes to tau / (1 - e^{-s tau}) -> 1/s
    const double s = 1.0;
    double prev = 1.0;
    for (double tau : {0.1, 0.05, 0.025}) {
        const int n = static_cast<int>(std::ceil(30.0 / (s * tau)));
        std::vector<double> ones(static_cast<size_t>(n) + 1, 1.0);
        const double got = discrete_laplace_cf(ones, tau, s);
        const double closed = tau / (1.0 - std::exp(-s * tau));
        CHECK(got == doctest::Approx(closed).epsilon(1e-9));
        const double err = std::fabs(got - 1.0 / s);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("discrete laplace tail guard and dominant first term") {
    std::vector<double> few(10, 1.0);
    CHECK_THROWS_AS((void)discrete_laplace_cf(few, 0.01, 1.0), TailError);
    // huge s: only the first term contributes
    std::vector<double> layers{1.0, 0.7, 0.5, 0.4, 0.35, 0.3};
    const double got = discrete_laplace_cf(layers, 1.0, 30.0);
    CHECK(got == doctest::Approx(1.0 * 0.7).epsilon(1e-9));
}

TEST_CASE("discrete laplace of scheme layers approaches the laplace symbol") {
    const auto rho = make_atomic_measure({{1.0, 1.0}});
    const double s = 1.0, xi = 1.0, beta = 0.5;
    const double target = laplace_symbol(beta, symbol_psi(rho, xi), s);
    double prev = 1e9;
    for (double h : {0.8, 0.4, 0.2}) {
        const double tau = 0.9 * stability_bound(rho, 1, h, 2048, beta);
        const int n = static_cast<int>(std::ceil(26.0 / (s * tau)));
        const auto table = gl_coefficients(beta, n, tau);
        const auto kernel = build_kernel(rho, 1, h, table, 2048);
        const auto seq = cf_recursion(table, kernel.q_hat(xi), n);
        const double got = discrete_laplace_cf(seq, tau, s);
        const double err = std::fabs(got - target);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.1);
}

TEST_CASE("fourier consistency: transforming the density back recovers the cf") {
    // on the full-period grid the inversion is a plain DFT, so summing the
    // density against e^{i x xi} at the grid frequencies must return the
    // input transform
    const auto rho = make_atomic_measure({{0.7, 0.3}, {1.5, 0.7}});
    const double dx = 0.1;
    const int half = 2048;
    const auto x = uniform_grid(dx, half);
    const double t = 1.0;
    const auto g = green_function_beta1(rho, t, x);
    const double dxi = 2.0 * kPi / (4096.0 * dx);
    for (int m : {1, 4, 32, 200}) {
        const double xi = m * dxi;
        double re = 0.0;
        for (int j = -half; j < half; ++j) {
            re += g[static_cast<size_t>(j + half)] * std::cos(j * dx * xi) * dx;
        }
        const double want = std::exp(t * symbol_psi(rho, xi));
        CHECK(std::fabs(re - want) <= 1e-8);
    }
}

TEST_CASE("tabulated reference transform keeps its range and shape") {
    const auto rho = make_atomic_measure({{0.6, 0.5}, {1.4, 0.5}});
    std::vector<double> xi;
    for (int i = 0; i <= 100; ++i) xi.push_back(i * 0.25);
    const auto sol = tabulate_cf(rho, 0.6, 2.0, xi);
    REQUIRE(sol.cf_values.size() == xi.size());
    CHECK(sol.cf_values[0] == 1.0);
    for (size_t i = 1; i < sol.cf_values.size(); ++i) {
        CHECK(sol.cf_values[i] > 0.0);
        CHECK(sol.cf_values[i] <= 1.0);
        CHECK(sol.cf_values[i] <= sol.cf_values[i - 1]);
    }
}
