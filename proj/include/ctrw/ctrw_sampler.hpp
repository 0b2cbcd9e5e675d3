#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ctrw/master_scheme.hpp"
#include "ctrw/space_kernel.hpp"
#include "ctrw/time_discretization.hpp"

namespace ctrw {

namespace detail {

/// Counter-based, splittable uniform stream: the value consumed at
/// (master_seed, walker, step, slot) is a pure function of its address, so
/// ensembles are reproducible regardless of how walkers are scheduled.
struct CounterRng {
    std::uint64_t key;

    CounterRng(std::uint64_t master_seed, std::uint64_t walker_index);

    std::uint64_t bits(std::uint64_t step, std::uint64_t slot) const;
    /// uniform in [0, 1)
    double uniform(std::uint64_t step, std::uint64_t slot) const;
};

/// Walker's alias table for O(1) draws from the jump law {q_k / c_1}.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> weights);
    std::size_t sample(double u_slot, double u_coin) const;

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

} // namespace detail

/// N non-Markovian walker paths with full position history (the memory
/// branch revisits past positions) and a recorded master seed.
class WalkerEnsemble {
public:
    WalkerEnsemble(int dim_d, int n_walkers, int n_steps, std::uint64_t master_seed);

    int dim() const { return dim_; }
    int n_walkers() const { return n_walkers_; }
    int current_step() const { return current_step_; }
    std::uint64_t master_seed() const { return master_seed_; }

    std::array<int, 3> position(int walker, int step) const;
    void set_position(int walker, int step, const std::array<int, 3>& site);

    /// branch usage counters: [origin revisits, memory revisits, jumps]
    std::array<std::uint64_t, 3>& branch_counts() { return branch_counts_; }
    const std::array<std::uint64_t, 3>& branch_counts() const { return branch_counts_; }

    void set_current_step(int s) { current_step_ = s; }

private:
    int dim_;
    int n_walkers_;
    int n_steps_;
    int current_step_ = 0;
    std::uint64_t master_seed_;
    std::vector<std::int32_t> sites_; // [walker][step][3]
    std::array<std::uint64_t, 3> branch_counts_{0, 0, 0};
};

/// Samples the lattice walk whose one-step law is exactly the grid
/// recursion, read as a mixture over the transition probabilities:
/// the walker returns to the origin with weight gamma~_n, revisits its own
/// position at time n+1-m with weight c_m, and otherwise jumps by k from
/// its current site with weight q_k (q_0 = stay). Under the stability bound
/// these weights sum to the time measure's mass (1 for probability input).
class NonMarkovSampler {
public:
    NonMarkovSampler(const CoefficientTable& coeffs, const LatticeKernel& kernel);

    /// One transition for a single path: path holds positions S_0..S_{step_n};
    /// appends S_{step_n+1}. rng addresses the per-walker stream.
    void advance_walker(std::vector<std::array<int, 3>>& path, int step_n,
                        const detail::CounterRng& rng,
                        std::array<std::uint64_t, 3>* branch_counts = nullptr) const;

    /// Deterministic ensemble of independent paths.
    WalkerEnsemble sample_ensemble(int n_walkers, int n_steps,
                                   std::uint64_t master_seed) const;

private:
    const CoefficientTable& coeffs_;
    const LatticeKernel& kernel_;
    double c1_;
    std::vector<double> memory_prefix_;        // prefix sums of c_2..c_m
    std::vector<std::array<int, 3>> offsets_;  // jump support incl. origin
    detail::AliasTable alias_;

    static std::vector<double> jump_weights(const LatticeKernel& kernel,
                                            std::vector<std::array<int, 3>>& offsets);
};

/// (1/N) sum_w exp(i h S_w . xi) over final positions; exactly 1 at xi = 0.
std::complex<double> empirical_cf(const WalkerEnsemble& ensemble, double h,
                                  std::span<const double> xi);
std::complex<double> empirical_cf(const WalkerEnsemble& ensemble, double h, double xi);

/// Histogram of final positions over the window [-J, J]^d (counts), for
/// comparison against a grid layer. Walkers outside the window land in the
/// overflow counter.
struct FinalHistogram {
    std::vector<double> counts;
    double overflow = 0.0;
};
FinalHistogram final_position_histogram(const WalkerEnsemble& ensemble, int window_J);

/// Pearson chi-square goodness of fit with tail pooling (expected counts
/// below min_expected are merged inward). p-value from the regularized
/// upper incomplete gamma.
struct ChiSquareResult {
    double statistic;
    int dof;
    double p_value;
};
ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected,
                               double min_expected = 5.0);

} // namespace ctrw
