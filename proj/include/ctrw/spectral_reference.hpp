#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ctrw/measures.hpp"
#include "ctrw/special_functions.hpp"

namespace ctrw {

/// Exact characteristic function of the time-changed process,
/// E_beta(Psi(xi) t^beta).
double exact_cf(const SpectralMeasure& rho, double beta, double t,
                std::span<const double> xi, const MLEvalConfig& ml = {});
double exact_cf(const SpectralMeasure& rho, double beta, double t, double xi,
                const MLEvalConfig& ml = {});

/// Reference transform tabulated over a radial frequency grid: values are
/// in (0, 1], equal 1 at xi = 0, and are nonincreasing in |xi|.
struct SpectralSolution {
    double beta;
    double t;
    std::vector<double> xi_grid;
    std::vector<double> cf_values;
};
SpectralSolution tabulate_cf(const SpectralMeasure& rho, double beta, double t,
                             std::vector<double> xi_grid, const MLEvalConfig& ml = {});

/// FFT inversion policy. The frequency cutoff is pi / dx (Nyquist of the
/// requested grid); construction fails with AliasingError when the
/// transform has not decayed below max_cf_at_cutoff there. min_modes pads
/// the internal grid (power of two).
struct FftConfig {
    int min_modes = 4096;
    double max_cf_at_cutoff = 1e-12;
};

/// Green's function of the beta = 1 equation on a uniform symmetric grid:
/// (1/2pi) Int exp(t Psi(xi) - i x xi) dxi via FFT. One spatial dimension.
std::vector<double> green_function_beta1(const SpectralMeasure& rho, double t,
                                         std::span<const double> x_grid,
                                         const FftConfig& cfg = {});

/// Fractional-in-time density: the same inversion with
/// E_beta(Psi(xi) t^beta) as the transform. E_beta decays only
/// algebraically, so the cutoff check uses cfg.max_cf_at_cutoff (default
/// 1e-8 here) and heavy operators need either fine grids or a caller-chosen
/// looser cutoff.
std::vector<double> frac_density(const SpectralMeasure& rho, double beta, double t,
                                 std::span<const double> x_grid,
                                 FftConfig cfg = {4096, 1e-8},
                                 const MLEvalConfig& ml = {});

/// Fourier-Laplace transform of the solution: s^{beta-1} / (s^beta - psi).
double laplace_symbol(double beta, double psi_val, double s);

/// Discrete Laplace transform of a characteristic-function layer sequence
/// u_hat^0 ... u_hat^N:  tau sum_{n=0}^{N-1} u_hat^{n+1} e^{-s n tau}.
/// Throws TailError unless exp(-s tau (N-1)) < 1e-10.
double discrete_laplace_cf(std::span<const double> u_hat_layers, double tau, double s);

namespace detail {

/// In-place radix-2 complex FFT; sign = -1 forward, +1 inverse (unscaled).
void fft_radix2(std::vector<std::complex<double>>& a, int sign);

} // namespace detail
} // namespace ctrw
