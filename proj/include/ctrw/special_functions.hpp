#pragma once

#include <cstddef>

namespace ctrw {

/// Gamma function via the Lanczos approximation (g = 7, 9 coefficients),
/// with the reflection formula for arguments below 1/2. Relative accuracy
/// is ~1e-13 away from the poles at 0, -1, -2, ...
double gamma_fn(double x);

/// log Gamma for x > 0 (same Lanczos kernel, no reflection).
double log_gamma(double x);

/// sin(pi*x) with exact argument reduction, so sin_pi(n) == 0 for integer n.
double sin_pi(double x);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a),
/// a > 0, x >= 0. Series for x < a+1, continued fraction otherwise.
double regularized_gamma_q(double a, double x);

/// Evaluation policy for the one-parameter Mittag-Leffler function on the
/// nonpositive real axis.
struct MLEvalConfig {
    double series_cutoff = 5.0;   ///< |z| threshold: prefer power series below it
    int asymptotic_terms = 200;   ///< cap on asymptotic terms (optimal truncation stops earlier)
    double target_rel_err = 1e-8; ///< accuracy target used for route selection
};

/// E_beta(z) for beta in (0,1], z <= 0. beta == 1 short-circuits to exp(z).
/// Result is in (0, 1]; E_beta(0) == 1 exactly.
double mittag_leffler(double beta, double z, const MLEvalConfig& cfg = {});

/// Normalizing constant of the hypersingular operator,
///   b(alpha) = alpha Gamma(alpha/2) Gamma((d+alpha)/2) sin(alpha pi/2)
///              / (2^{2-alpha} pi^{1+d/2}),
/// strictly positive for alpha in (0,2), vanishing at both endpoints.
double b_alpha(double alpha, int dim_d);

namespace detail {

/// Value plus a (coarse, conservative) relative error estimate.
struct MLResult {
    double value;
    double rel_err_est;
};

/// Power series sum_k z^k / Gamma(1+beta k), accumulated in long double with
/// compensated summation. The estimate tracks cancellation: eps_ld * max|term| / |sum|.
MLResult ml_series(double beta, double z);

/// Asymptotic expansion -sum_{k>=1} z^{-k} / Gamma(1-beta k), optimally
/// truncated at the smallest term; the estimate is that term's relative size.
MLResult ml_asymptotic(double beta, double z, int max_terms);

/// Spectral integral representation for 0 < beta < 1, x = -z > 0:
///   E_beta(-x) = (sin(beta pi)/(pi beta))
///                * Int_0^inf exp(-x u^{1/beta}) / (u^2 + 2u cos(beta pi) + 1) du.
/// Smooth positive integrand, no cancellation; adaptive quadrature.
MLResult ml_integral(double beta, double x);

} // namespace detail
} // namespace ctrw
