#include "ctrw/ctrw_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ctrw/errors.hpp"
#include "ctrw/special_functions.hpp"

namespace ctrw {

namespace detail {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

} // namespace

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t walker_index)
    : key(mix64(master_seed + kGolden * (walker_index + 1))) {}

std::uint64_t CounterRng::bits(std::uint64_t step, std::uint64_t slot) const {
    return mix64(key + kGolden * (step * 8 + slot + 1));
}

double CounterRng::uniform(std::uint64_t step, std::uint64_t slot) const {
    return static_cast<double>(bits(step, slot) >> 11) * 0x1.0p-53;
}

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty weight vector");
    double total = 0.0;
    for (const double w : weights) {
        if (w < 0.0) throw std::invalid_argument("AliasTable: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("AliasTable: zero total weight");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * n / total;
    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (const std::uint32_t i : large) prob_[i] = 1.0;
    for (const std::uint32_t i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::sample(double u_slot, double u_coin) const {
    const std::size_t n = prob_.size();
    std::size_t slot = static_cast<std::size_t>(u_slot * n);
    if (slot >= n) slot = n - 1;
    return u_coin < prob_[slot] ? slot : alias_[slot];
}

} // namespace detail

WalkerEnsemble::WalkerEnsemble(int dim_d, int n_walkers, int n_steps,
                               std::uint64_t master_seed)
    : dim_(dim_d), n_walkers_(n_walkers), n_steps_(n_steps), master_seed_(master_seed) {
    if (n_walkers < 1) throw std::invalid_argument("WalkerEnsemble: n_walkers must be >= 1");
    if (n_steps < 0) throw std::invalid_argument("WalkerEnsemble: n_steps must be >= 0");
    sites_.assign(static_cast<std::size_t>(n_walkers) * (n_steps + 1) * 3, 0);
}

std::array<int, 3> WalkerEnsemble::position(int walker, int step) const {
    const std::size_t base =
        (static_cast<std::size_t>(walker) * (n_steps_ + 1) + static_cast<std::size_t>(step)) * 3;
    return {sites_[base], sites_[base + 1], sites_[base + 2]};
}

void WalkerEnsemble::set_position(int walker, int step, const std::array<int, 3>& site) {
    const std::size_t base =
        (static_cast<std::size_t>(walker) * (n_steps_ + 1) + static_cast<std::size_t>(step)) * 3;
    sites_[base] = site[0];
    sites_[base + 1] = site[1];
    sites_[base + 2] = site[2];
}

std::vector<double> NonMarkovSampler::jump_weights(const LatticeKernel& kernel,
                                                   std::vector<std::array<int, 3>>& offsets) {
    offsets.clear();
    std::vector<double> weights;
    const int K = kernel.trunc_K();
    const int dim = kernel.dim();
    const int ky_lo = dim >= 2 ? -K : 0, ky_hi = dim >= 2 ? K : 0;
    const int kz_lo = dim >= 3 ? -K : 0, kz_hi = dim >= 3 ? K : 0;
    for (int kz = kz_lo; kz <= kz_hi; ++kz)
        for (int ky = ky_lo; ky <= ky_hi; ++ky)
            for (int kx = -K; kx <= K; ++kx) {
                const double w = kernel.q_at(kx, ky, kz);
                const bool origin = kx == 0 && ky == 0 && kz == 0;
                if (w > 0.0 || origin) {
                    offsets.push_back({kx, ky, kz});
                    weights.push_back(std::max(w, 0.0));
                }
            }
    return weights;
}

NonMarkovSampler::NonMarkovSampler(const CoefficientTable& coeffs,
                                   const LatticeKernel& kernel)
    : coeffs_(coeffs),
      kernel_(kernel),
      c1_(coeffs.c1()),
      alias_(jump_weights(kernel, offsets_)) {
    if (kernel.q0() < -1e-12) {
        std::ostringstream os;
        os << "NonMarkovSampler: q0 = " << kernel.q0()
           << " < 0; tau exceeds the stability bound";
        throw StabilityViolation(os.str());
    }
    // prefix_[m] = c_2 + ... + c_m (prefix_[0] = prefix_[1] = 0)
    memory_prefix_.assign(static_cast<std::size_t>(coeffs.horizon()) + 1, 0.0);
    for (int m = 2; m <= coeffs.horizon(); ++m) {
        memory_prefix_[static_cast<std::size_t>(m)] =
            memory_prefix_[static_cast<std::size_t>(m) - 1] + coeffs.c(m);
    }
}

void NonMarkovSampler::advance_walker(std::vector<std::array<int, 3>>& path, int step_n,
                                      const detail::CounterRng& rng,
                                      std::array<std::uint64_t, 3>* branch_counts) const {
    if (static_cast<int>(path.size()) != step_n + 1) {
        throw std::invalid_argument("advance_walker: path length must be step_n + 1");
    }
    if (step_n > coeffs_.horizon()) {
        throw HistoryMissing("advance_walker: coefficient table horizon exhausted");
    }
    const std::uint64_t s = static_cast<std::uint64_t>(step_n);
    const double u = rng.uniform(s, 0);
    std::array<int, 3> next{};
    if (u < c1_) {
        // Markov branch: jump by k (possibly k = 0) from the current site
        const std::size_t pick = alias_.sample(rng.uniform(s, 1), rng.uniform(s, 2));
        const auto& k = offsets_[pick];
        const auto& cur = path.back();
        next = {cur[0] + k[0], cur[1] + k[1], cur[2] + k[2]};
        if (branch_counts) ++(*branch_counts)[2];
    } else {
        // memory branch over [c_2 .. c_n | gamma~_n], total 1 - c_1
        const double v = u - c1_;
        const int n_avail = std::min(step_n, coeffs_.horizon());
        const double mem_top = memory_prefix_[static_cast<std::size_t>(std::max(n_avail, 1))];
        if (v < mem_top) {
            // find smallest m with prefix_[m] > v: revisit S_{n+1-m}
            const auto begin = memory_prefix_.begin() + 2;
            const auto end = memory_prefix_.begin() + n_avail + 1;
            const int m =
                static_cast<int>(std::upper_bound(begin, end, v) - memory_prefix_.begin());
            next = path[static_cast<std::size_t>(step_n + 1 - m)];
            if (branch_counts) ++(*branch_counts)[1];
        } else {
            next = path.front(); // origin: the time-0 position
            if (branch_counts) ++(*branch_counts)[0];
        }
    }
    path.push_back(next);
}

WalkerEnsemble NonMarkovSampler::sample_ensemble(int n_walkers, int n_steps,
                                                 std::uint64_t master_seed) const {
    if (n_steps > coeffs_.horizon() + 1) {
        throw HistoryMissing("sample_ensemble: coefficient table horizon too short");
    }
    WalkerEnsemble ensemble(kernel_.dim(), n_walkers, n_steps, master_seed);
    std::vector<std::array<int, 3>> path;
    path.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (int w = 0; w < n_walkers; ++w) {
        path.clear();
        path.push_back({0, 0, 0});
        const detail::CounterRng rng(master_seed, static_cast<std::uint64_t>(w));
        for (int n = 0; n < n_steps; ++n) {
            advance_walker(path, n, rng, &ensemble.branch_counts());
        }
        for (int n = 0; n <= n_steps; ++n) {
            ensemble.set_position(w, n, path[static_cast<std::size_t>(n)]);
        }
    }
    ensemble.set_current_step(n_steps);
    return ensemble;
}

std::complex<double> empirical_cf(const WalkerEnsemble& ensemble, double h,
                                  std::span<const double> xi) {
    const double x0 = h * (xi.size() > 0 ? xi[0] : 0.0);
    const double x1 = h * (xi.size() > 1 ? xi[1] : 0.0);
    const double x2 = h * (xi.size() > 2 ? xi[2] : 0.0);
    const int n = ensemble.current_step();
    double re = 0.0, im = 0.0;
    for (int w = 0; w < ensemble.n_walkers(); ++w) {
        const auto s = ensemble.position(w, n);
        const double ph = s[0] * x0 + s[1] * x1 + s[2] * x2;
        re += std::cos(ph);
        im += std::sin(ph);
    }
    const double inv = 1.0 / ensemble.n_walkers();
    return {re * inv, im * inv};
}

std::complex<double> empirical_cf(const WalkerEnsemble& ensemble, double h, double xi) {
    return empirical_cf(ensemble, h, std::span<const double>(&xi, 1));
}

FinalHistogram final_position_histogram(const WalkerEnsemble& ensemble, int window_J) {
    const int J = window_J;
    const int ext = 2 * J + 1;
    std::size_t size = 1;
    for (int i = 0; i < ensemble.dim(); ++i) size *= static_cast<std::size_t>(ext);
    FinalHistogram hist;
    hist.counts.assign(size, 0.0);
    const int n = ensemble.current_step();
    for (int w = 0; w < ensemble.n_walkers(); ++w) {
        const auto s = ensemble.position(w, n);
        bool inside = true;
        for (int d = 0; d < ensemble.dim(); ++d) inside = inside && std::abs(s[d]) <= J;
        if (!inside) {
            hist.overflow += 1.0;
            continue;
        }
        std::size_t idx = static_cast<std::size_t>(s[0] + J);
        if (ensemble.dim() >= 2) idx += static_cast<std::size_t>(s[1] + J) * ext;
        if (ensemble.dim() >= 3) idx += static_cast<std::size_t>(s[2] + J) * ext * ext;
        hist.counts[idx] += 1.0;
    }
    return hist;
}

ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected, double min_expected) {
    if (observed.size() != expected.size() || observed.empty()) {
        throw std::invalid_argument("chi_square_gof: size mismatch");
    }
    // pool cells with small expectation into their neighbor toward the center
    std::vector<double> obs, exp;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp.empty()) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        } else {
            obs.back() += o_acc;
            exp.back() += e_acc;
        }
    }
    if (exp.size() < 2) {
        throw std::invalid_argument("chi_square_gof: too few cells after pooling");
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        const double d = obs[i] - exp[i];
        stat += d * d / exp[i];
    }
    const int dof = static_cast<int>(exp.size()) - 1;
    ChiSquareResult r;
    r.statistic = stat;
    r.dof = dof;
    r.p_value = regularized_gamma_q(0.5 * dof, 0.5 * stat);
    return r;
}

} // namespace ctrw
