#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ctrw {

/// One (order, weight) pair of a discretized mixing measure.
struct WeightedNode {
    double order;
    double weight;
};

/// Finite mixing measure over the stable orders alpha in (0, 2).
/// Continuous densities are reduced at construction to Gauss-Legendre
/// nodes, so downstream code always sees a finite weighted sum.
/// Immutable after construction.
class SpectralMeasure {
public:
    SpectralMeasure(std::vector<WeightedNode> atoms, std::vector<WeightedNode> density_nodes);

    const std::vector<WeightedNode>& atoms() const { return atoms_; }
    const std::vector<WeightedNode>& density_nodes() const { return density_nodes_; }

    /// Atoms followed by density nodes; the summation order used everywhere.
    const std::vector<WeightedNode>& nodes() const { return all_; }

    double total_mass() const { return total_mass_; }

    std::string to_json() const;
    static SpectralMeasure from_json(const std::string& text);

private:
    std::vector<WeightedNode> atoms_;
    std::vector<WeightedNode> density_nodes_;
    std::vector<WeightedNode> all_;
    double total_mass_ = 0.0;
};

/// Finite mixing measure over the fractional time orders beta in (0, 1].
class TimeMeasure {
public:
    TimeMeasure(std::vector<WeightedNode> atoms, std::vector<WeightedNode> density_nodes);

    const std::vector<WeightedNode>& atoms() const { return atoms_; }
    const std::vector<WeightedNode>& density_nodes() const { return density_nodes_; }
    const std::vector<WeightedNode>& nodes() const { return all_; }

    double total_mass() const { return total_mass_; }
    bool has_order_one() const;

    std::string to_json() const;
    static TimeMeasure from_json(const std::string& text);

private:
    std::vector<WeightedNode> atoms_;
    std::vector<WeightedNode> density_nodes_;
    std::vector<WeightedNode> all_;
    double total_mass_ = 0.0;
};

/// Purely atomic measure from (alpha, weight) pairs.
SpectralMeasure make_atomic_measure(const std::vector<std::pair<double, double>>& pairs);

/// Continuous-density measure reduced to n_nodes Gauss-Legendre nodes on
/// (a, b) strictly inside (0, 2); weights are quad_weight * density(node).
SpectralMeasure make_density_measure(const std::function<double(double)>& density,
                                     double a, double b, int n_nodes = 32);

TimeMeasure make_atomic_time_measure(const std::vector<std::pair<double, double>>& pairs);
TimeMeasure make_density_time_measure(const std::function<double(double)>& density,
                                      double a, double b, int n_nodes = 32);

/// Levy symbol Psi(xi) = -Int_0^2 |xi|^alpha drho(alpha), evaluated as the
/// finite weighted sum over the measure's nodes. Always <= 0, zero iff xi = 0.
double symbol_psi(const SpectralMeasure& rho, std::span<const double> xi);
double symbol_psi(const SpectralMeasure& rho, double xi); // 1-d convenience

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1]; exact for polynomials of
/// degree <= 2n-1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace detail
} // namespace ctrw
