#include "ctrw/spectral_reference.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

struct UniformGrid {
    double dx;
    int half; // grid is x_j = j dx, j = -half..half
};

UniformGrid check_uniform_symmetric(std::span<const double> x_grid) {
    if (x_grid.size() < 3 || x_grid.size() % 2 == 0) {
        throw std::invalid_argument(
            "density grid must be uniform and symmetric about 0 (odd point count)");
    }
    const double dx = x_grid[1] - x_grid[0];
    if (!(dx > 0.0)) throw std::invalid_argument("density grid must be increasing");
    for (std::size_t i = 1; i < x_grid.size(); ++i) {
        if (std::fabs(x_grid[i] - x_grid[i - 1] - dx) > 1e-9 * dx) {
            throw std::invalid_argument("density grid must be uniformly spaced");
        }
    }
    const int half = static_cast<int>(x_grid.size() / 2);
    if (std::fabs(x_grid[static_cast<std::size_t>(half)]) > 1e-9 * dx) {
        throw std::invalid_argument("density grid must be symmetric about 0");
    }
    return {dx, half};
}

/// Shared FFT inversion of a real even transform F(|xi|), sampled at the
/// grid points of x_grid. The internal period N dx wraps tail mass back
/// into the window (the transform value at xi = 0 fixes the total mass).
std::vector<double> invert_even_transform(const std::function<double(double)>& transform,
                                          std::span<const double> x_grid,
                                          const FftConfig& cfg, const char* what) {
    const auto grid = check_uniform_symmetric(x_grid);
    const double xi_max = kPi / grid.dx;
    const double edge = transform(xi_max);
    if (!(edge < cfg.max_cf_at_cutoff)) {
        std::ostringstream os;
        os << what << ": transform at the Nyquist cutoff " << xi_max << " is " << edge
           << " >= " << cfg.max_cf_at_cutoff << "; refine the spatial grid";
        throw AliasingError(os.str());
    }
    const std::size_t N =
        next_pow2(std::max<std::size_t>(static_cast<std::size_t>(cfg.min_modes),
                                        x_grid.size() - 1));
    const double dxi = 2.0 * kPi / (static_cast<double>(N) * grid.dx);
    std::vector<std::complex<double>> a(N);
    const int half_n = static_cast<int>(N / 2);
    for (std::size_t m = 0; m < N; ++m) {
        const int freq = static_cast<int>(m) - half_n;
        a[m] = transform(std::fabs(freq * dxi));
    }
    // u(x_j) = (dxi / 2pi) sum_m F(xi_m) e^{-i j m 2pi/N} e^{i pi j}
    detail::fft_radix2(a, -1);
    std::vector<double> out(x_grid.size(), 0.0);
    const double scale = dxi / (2.0 * kPi);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const long j = static_cast<long>(i) - grid.half;
        const std::size_t idx = static_cast<std::size_t>(((j % static_cast<long>(N)) +
                                                          static_cast<long>(N)) %
                                                         static_cast<long>(N));
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        out[i] = scale * sign * a[idx].real();
    }
    return out;
}

} // namespace

namespace detail {

void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("fft_radix2: length must be a power of two");
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace detail

double exact_cf(const SpectralMeasure& rho, double beta, double t,
                std::span<const double> xi, const MLEvalConfig& ml) {
    if (!(t > 0.0)) throw std::invalid_argument("exact_cf: t must be > 0");
    const double psi = symbol_psi(rho, xi);
    return mittag_leffler(beta, psi * std::pow(t, beta), ml);
}

double exact_cf(const SpectralMeasure& rho, double beta, double t, double xi,
                const MLEvalConfig& ml) {
    return exact_cf(rho, beta, t, std::span<const double>(&xi, 1), ml);
}

SpectralSolution tabulate_cf(const SpectralMeasure& rho, double beta, double t,
                             std::vector<double> xi_grid, const MLEvalConfig& ml) {
    SpectralSolution sol;
    sol.beta = beta;
    sol.t = t;
    sol.cf_values.reserve(xi_grid.size());
    for (const double xi : xi_grid) {
        sol.cf_values.push_back(exact_cf(rho, beta, t, std::fabs(xi), ml));
    }
    sol.xi_grid = std::move(xi_grid);
    return sol;
}

std::vector<double> green_function_beta1(const SpectralMeasure& rho, double t,
                                         std::span<const double> x_grid,
                                         const FftConfig& cfg) {
    if (!(t > 0.0)) throw std::invalid_argument("green_function_beta1: t must be > 0");
    auto transform = [&](double r) {
        return std::exp(t * symbol_psi(rho, r));
    };
    return invert_even_transform(transform, x_grid, cfg, "green_function_beta1");
}

std::vector<double> frac_density(const SpectralMeasure& rho, double beta, double t,
                                 std::span<const double> x_grid, FftConfig cfg,
                                 const MLEvalConfig& ml) {
    if (!(t > 0.0)) throw std::invalid_argument("frac_density: t must be > 0");
    if (beta == 1.0) {
        return green_function_beta1(rho, t, x_grid, cfg);
    }
    const double tb = std::pow(t, beta);
    auto transform = [&](double r) {
        return mittag_leffler(beta, symbol_psi(rho, r) * tb, ml);
    };
    return invert_even_transform(transform, x_grid, cfg, "frac_density");
}

double laplace_symbol(double beta, double psi_val, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("laplace_symbol: s must be > 0");
    if (psi_val > 0.0) throw std::invalid_argument("laplace_symbol: psi must be <= 0");
    return std::pow(s, beta - 1.0) / (std::pow(s, beta) - psi_val);
}

double discrete_laplace_cf(std::span<const double> u_hat_layers, double tau, double s) {
    if (u_hat_layers.size() < 2) {
        throw std::invalid_argument("discrete_laplace_cf: need at least two layers");
    }
    if (!(tau > 0.0) || !(s > 0.0)) {
        throw std::invalid_argument("discrete_laplace_cf: tau and s must be > 0");
    }
    const std::size_t N = u_hat_layers.size() - 1; // layers u_hat^0..u_hat^N
    const double tail = std::exp(-s * tau * static_cast<double>(N - 1));
    if (!(tail < 1e-10)) {
        std::ostringstream os;
        os << "discrete_laplace_cf: exp(-s tau n) = " << tail
           << " >= 1e-10; extend the layer sequence";
        throw TailError(os.str());
    }
    // tau sum_{n=0}^{N-1} u_hat^{n+1} e^{-s n tau}
    const double decay = std::exp(-s * tau);
    double w = 1.0;
    double acc = 0.0;
    for (std::size_t n = 0; n + 1 <= N; ++n) {
        acc += u_hat_layers[n + 1] * w;
        w *= decay;
    }
    return tau * acc;
}

} // namespace ctrw
