#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ctrw/measures.hpp"
#include "ctrw/time_discretization.hpp"

namespace ctrw {

/// Lattice jump weights q_k for the distributed-order hypersingular operator
/// on the truncated integer lattice {k : 0 < |k| <= K} (Euclidean radius),
/// stored densely over the box [-K, K]^d. The origin weight closes the sum,
///   q_0 = c_1 - sum_{k != 0} q_k,
/// so sum_k q_k == c_1 exactly; a step is admissible only when q_0 >= 0.
///
/// q_k = jump_scale * d_k with d_k = Q_k(h)/|k|^d and
/// Q_k(h) = 2 Int b(alpha) / (h^alpha |k|^alpha) drho(alpha). The jump scale
/// is 1/a(tau): tau^beta for the backward-difference weights, and the
/// matching factor for the quadrature / distributed variants.
class LatticeKernel {
public:
    LatticeKernel(const SpectralMeasure& rho, int dim_d, double h, double tau,
                  double beta, double c1, double jump_scale, int trunc_K,
                  double tail_rel_tol);

    int dim() const { return dim_; }
    int trunc_K() const { return K_; }
    double h() const { return h_; }
    double tau() const { return tau_; }
    double beta() const { return beta_; }
    double c1() const { return c1_; }
    double jump_scale() const { return jump_scale_; }
    double q0() const { return q0_; }
    /// Q(h) = sum_{k != 0} Q_k(h) |k|^{-d} over the truncated lattice.
    double q_total() const { return Q_total_; }
    /// Integral estimate of the omitted tail sum_{|k| > K} Q_k(h) |k|^{-d}.
    double tail_estimate() const { return tail_estimate_; }

    int box_extent() const { return 2 * K_ + 1; }
    std::size_t box_size() const { return q_.size(); }
    const std::vector<double>& box() const { return q_; }

    std::size_t box_index(int kx, int ky = 0, int kz = 0) const;
    double q_at(int kx, int ky = 0, int kz = 0) const { return q_[box_index(kx, ky, kz)]; }

    /// d_hat(h xi) = sum_{k != 0} d_k (cos(k . h xi) - 1); real by symmetry,
    /// <= 0, and -> Psi(xi) as h -> 0.
    double kernel_cf(std::span<const double> xi) const;
    double kernel_cf(double xi) const;

    /// q_hat(h xi) = sum_k q_k e^{i k h xi} = c_1 + jump_scale * d_hat(h xi).
    double q_hat(std::span<const double> xi) const;
    double q_hat(double xi) const;

private:
    int dim_;
    int K_;
    double h_, tau_, beta_;
    double c1_, jump_scale_;
    double q0_ = 0.0;
    double Q_total_ = 0.0;
    double tail_estimate_ = 0.0;
    std::vector<double> q_; // dense over [-K, K]^d, zero outside |k| <= K
};

/// Kernel coupled to the backward-difference weights: jump scale tau^beta,
/// c_1 = beta. tail_rel_tol guards the truncation estimate against Q(h);
/// the default only reports (heavy tails make small relative tails
/// unreachable at any practical K, so callers opt into the strict check).
LatticeKernel build_kernel(const SpectralMeasure& rho, int dim_d, double h, double tau,
                           double beta, int trunc_K,
                           double tail_rel_tol = std::numeric_limits<double>::infinity());

/// Kernel matched to an existing coefficient table (any variant); c_1 and
/// the jump scale come from the table.
LatticeKernel build_kernel(const SpectralMeasure& rho, int dim_d, double h,
                           const CoefficientTable& coeffs, int trunc_K,
                           double tail_rel_tol = std::numeric_limits<double>::infinity());

/// Characteristic function of the single-order lattice sequence
/// p_k = b(alpha) h^{-alpha} |k|^{-(d+alpha)} (k != 0) with balancing origin
/// mass: p_hat(xi) -> -|xi|^alpha / 2 as h -> 0.
double p_hat(double alpha, int dim_d, double h, std::span<const double> xi, int trunc_K);
double p_hat(double alpha, int dim_d, double h, double xi, int trunc_K);

/// Markov one-step jump probabilities {p_k}: the q-box itself, with
/// p_0 = q_0 required nonnegative. Sums to c_1 (== 1 when beta == 1).
struct JumpProbabilities {
    int dim;
    int trunc_K;
    std::vector<double> p; // dense over [-K, K]^d
    double p0;
    double sum;
};
JumpProbabilities markov_probabilities(const LatticeKernel& kernel);

/// Largest admissible tau: (beta/Q(h))^{1/beta} for the backward-difference
/// variant, ((2 - 2^{1-beta}) / (Gamma(2-beta) Q(h)))^{1/beta} for the
/// quadrature variant.
double stability_bound(const SpectralMeasure& rho, int dim_d, double h, int trunc_K,
                       double beta, SchemeKind variant = SchemeKind::GL);

/// Distributed-order bound: the largest tau with c_1* a*(tau) >= Q(h),
/// found by bisection (a* is strictly decreasing in tau).
double distributed_stability_bound(const SpectralMeasure& rho, int dim_d, double h,
                                   int trunc_K, const TimeMeasure& mu,
                                   SchemeKind variant);

namespace detail {

/// Truncated lattice sum Q(h) for a measure (jump scale excluded).
double lattice_q_total(const SpectralMeasure& rho, int dim_d, double h, int trunc_K);

/// The stability formulas applied to a given Q(h) value.
double tau_max_from_q(double q_total, double beta, SchemeKind variant);

} // namespace detail
} // namespace ctrw
