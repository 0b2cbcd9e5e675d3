#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctrw/measures.hpp"

namespace ctrw {

enum class SchemeKind { GL, Liu, DistributedGL, DistributedLiu };

const char* scheme_kind_name(SchemeKind kind);

/// Non-Markovian time weights c_l (l = 1..n) and gamma_n (n = 0..horizon)
/// for one scheme variant, plus the prefactor a(tau). Immutable.
///
/// Conventions: coefficients are stored with the positive sign of the
/// probability interpretation (c_l = |binom(beta, l)| for the backward-
/// difference variant). gamma[0] = 1 from the summation formula; the
/// recursion's weight on the initial layer at step n is gamma[max(n, 1)],
/// because the n = 0 step collapses the current-layer and initial-layer
/// terms into one (expanding the backward difference at n = 0 gives
/// u^1 = (1 - c_1) u^0 + sum_k q_k u^0, i.e. weight gamma_1, and this is
/// what keeps the step-n branch weights summing to the measure's mass).
class CoefficientTable {
public:
    CoefficientTable(SchemeKind kind, double beta, std::optional<TimeMeasure> mu,
                     int horizon, double tau, double a_tau,
                     std::vector<double> c, std::vector<double> gamma);

    SchemeKind kind() const { return kind_; }
    double beta() const { return beta_; } // NaN for distributed tables
    const std::optional<TimeMeasure>& mu() const { return mu_; }
    int horizon() const { return horizon_; }
    double tau() const { return tau_; }
    double a_tau() const { return a_tau_; }

    /// c_l, 1 <= l <= horizon.
    double c(int l) const { return c_[static_cast<size_t>(l)]; }
    /// gamma_n, 0 <= n <= horizon.
    double gamma(int n) const { return gamma_[static_cast<size_t>(n)]; }

    double c1() const { return c_[1]; }
    /// Weight applied to the jump kernel in the recursion, 1/a(tau)
    /// (tau^beta for the backward-difference variant).
    double jump_scale() const { return 1.0 / a_tau_; }
    /// Weight on the initial layer when stepping from layer n to n+1.
    double memory_weight(int n) const { return gamma_[static_cast<size_t>(n < 1 ? 1 : n)]; }

    std::span<const double> c_array() const { return {c_.data() + 1, c_.size() - 1}; }
    std::span<const double> gamma_array() const { return gamma_; }

    std::string to_json() const;
    std::string to_csv() const;

private:
    SchemeKind kind_;
    double beta_;
    std::optional<TimeMeasure> mu_;
    int horizon_;
    double tau_;
    double a_tau_;
    std::vector<double> c_;     // c_[0] unused
    std::vector<double> gamma_; // gamma_[0] = 1
};

/// Backward Grunwald-Letnikov weights: c_1 = beta, c_{l+1} = c_l (l-beta)/(l+1),
/// gamma_n = gamma_{n-1} - c_n, a(tau) = tau^{-beta}. beta in (0, 1].
CoefficientTable gl_coefficients(double beta, int n, double tau);

/// Quadrature weights gamma_m = (m+1)^{1-beta} - m^{1-beta},
/// c_k = gamma_{k-1} - gamma_k, a(tau) = 1/(tau^beta Gamma(2-beta)).
/// beta strictly inside (0, 1).
CoefficientTable liu_coefficients(double beta, int n, double tau);

/// Distributed-order weights c_k* = Int c_k(beta) dmu, gamma_n* = Int gamma_n dmu,
/// a*(tau) = Int a(tau, beta) dmu, as weighted sums over the measure's nodes.
/// variant selects which single-order family is integrated (GL or Liu).
CoefficientTable distributed_coefficients(const TimeMeasure& mu, SchemeKind variant,
                                          int n, double tau);

/// Caputo-derivative approximation at the last sample time from equally
/// spaced samples f(t_0), ..., f(t_n) with step tau. O(tau) for the
/// backward-difference table, O(tau^{2-beta}) for the quadrature table.
double caputo_apply(const CoefficientTable& table, std::span<const double> samples,
                    double tau);

} // namespace ctrw
