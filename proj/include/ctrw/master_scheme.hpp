#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ctrw/space_kernel.hpp"
#include "ctrw/time_discretization.hpp"

namespace ctrw {

/// Full sequence of probability layers u^0 ... u^n on the bounded lattice
/// window [-J, J]^d (every layer is kept: the memory term needs all of
/// them). Mass pushed beyond the window by the jump convolution feeds a
/// per-layer deficit ledger that obeys the same recursion as the layers
/// (the memory weights act on past deficits too), so
/// sum_j u_j^n + boundary_mass_lost(n) stays at 1 for every n.
class GridLayerHistory {
public:
    GridLayerHistory(int dim_d, double h, double tau, int window_J);

    int dim() const { return dim_; }
    int window_J() const { return J_; }
    double h() const { return h_; }
    double tau() const { return tau_; }

    int layer_count() const { return static_cast<int>(layers_.size()); }
    std::span<const double> layer(int n) const { return layers_[static_cast<size_t>(n)]; }

    int window_extent() const { return 2 * J_ + 1; }
    std::size_t window_size() const { return layers_.front().size(); }
    std::size_t site_index(int jx, int jy = 0, int jz = 0) const;
    double value_at(int n, int jx, int jy = 0, int jz = 0) const {
        return layers_[static_cast<size_t>(n)][site_index(jx, jy, jz)];
    }

    double mass(int n) const;
    /// Missing mass of layer n (the deficit the window truncation created).
    double boundary_mass_lost(int n) const { return deficit_[static_cast<size_t>(n)]; }
    double boundary_mass_lost() const { return deficit_.back(); }
    /// |mass(n) + boundary_mass_lost(n) - 1|
    double conservation_defect(int n) const;
    /// max over layers of the conservation defect.
    double max_conservation_defect() const;

private:
    friend void step(GridLayerHistory&, const CoefficientTable&, const LatticeKernel&);

    int dim_;
    int J_;
    double h_, tau_;
    std::vector<std::vector<double>> layers_;
    std::vector<double> deficit_;
};

/// Single layer holding the discrete delta at the origin.
GridLayerHistory init_grid(int dim_d, double h, double tau, int window_J);

/// Append one layer:
///   u^{n+1}_j = gamma~_n u^0_j + sum_{m=2}^{n} c_m u^{n+1-m}_j
///             + sum_k q_k u^n_{j-k},
/// with gamma~_n = coeffs.memory_weight(n). Refuses to step when q_0 < 0.
void step(GridLayerHistory& state, const CoefficientTable& coeffs,
          const LatticeKernel& kernel);

/// Iterated step.
void run(GridLayerHistory& state, const CoefficientTable& coeffs,
         const LatticeKernel& kernel, int n_steps);

/// Characteristic function of layer n: sum_j u_j^n e^{i h j . xi}.
std::complex<double> grid_cf(const GridLayerHistory& state, int n,
                             std::span<const double> xi);
std::complex<double> grid_cf(const GridLayerHistory& state, int n, double xi);

/// The same recursion run directly on characteristic-function values for a
/// fixed frequency: u_hat^0 = 1,
///   u_hat^{n+1} = gamma~_n + sum_{m=2}^{n} c_m u_hat^{n+1-m} + q_hat u_hat^n.
/// Returns u_hat^0 ... u_hat^{n_layers}. This is the algebraic image of the
/// grid recursion, free of window truncation.
std::vector<double> cf_recursion(const CoefficientTable& coeffs, double q_hat,
                                 int n_layers);

} // namespace ctrw
