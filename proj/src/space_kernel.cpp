#include "ctrw/space_kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ctrw/errors.hpp"
#include "ctrw/special_functions.hpp"

namespace ctrw {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSurface[4] = {0.0, 2.0, 6.283185307179586, 12.566370614359172};

struct NodeFactor {
    double amplitude; // 2 w_i b(alpha_i) h^{-alpha_i}
    double exponent;  // d + alpha_i
    double alpha;
};

std::vector<NodeFactor> node_factors(const SpectralMeasure& rho, int dim_d, double h) {
    std::vector<NodeFactor> f;
    f.reserve(rho.nodes().size());
    for (const auto& node : rho.nodes()) {
        f.push_back({2.0 * node.weight * b_alpha(node.order, dim_d) * std::pow(h, -node.order),
                     dim_d + node.order, node.order});
    }
    return f;
}

// iterate the box [-K,K]^d, calling fn(kx, ky, kz, flat_index)
template <class Fn>
void for_each_box_site(int dim, int K, Fn&& fn) {
    if (dim == 1) {
        for (int kx = -K; kx <= K; ++kx) fn(kx, 0, 0, static_cast<std::size_t>(kx + K));
    } else if (dim == 2) {
        std::size_t idx = 0;
        for (int ky = -K; ky <= K; ++ky)
            for (int kx = -K; kx <= K; ++kx) fn(kx, ky, 0, idx++);
    } else {
        std::size_t idx = 0;
        for (int kz = -K; kz <= K; ++kz)
            for (int ky = -K; ky <= K; ++ky)
                for (int kx = -K; kx <= K; ++kx) fn(kx, ky, kz, idx++);
    }
}

} // namespace

LatticeKernel::LatticeKernel(const SpectralMeasure& rho, int dim_d, double h, double tau,
                             double beta, double c1, double jump_scale, int trunc_K,
                             double tail_rel_tol)
    : dim_(dim_d), K_(trunc_K), h_(h), tau_(tau), beta_(beta), c1_(c1),
      jump_scale_(jump_scale) {
    if (dim_d < 1 || dim_d > 3) {
        throw std::invalid_argument("LatticeKernel: dimension must be 1, 2 or 3");
    }
    if (trunc_K < 8) {
        throw std::invalid_argument("LatticeKernel: trunc_K must be >= 8");
    }
    if (!(h > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("LatticeKernel: h and tau must be > 0");
    }
    const auto factors = node_factors(rho, dim_d, h);
    std::size_t size = 1;
    for (int i = 0; i < dim_; ++i) size *= static_cast<std::size_t>(2 * K_ + 1);
    q_.assign(size, 0.0);

    const double K2 = static_cast<double>(K_) * static_cast<double>(K_);
    double d_sum = 0.0;
    for_each_box_site(dim_, K_, [&](int kx, int ky, int kz, std::size_t idx) {
        const double r2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky +
                          static_cast<double>(kz) * kz;
        if (r2 == 0.0 || r2 > K2) return;
        const double lr = 0.5 * std::log(r2);
        double dk = 0.0;
        for (const auto& f : factors) dk += f.amplitude * std::exp(-f.exponent * lr);
        q_[idx] = jump_scale_ * dk;
        d_sum += dk;
    });
    Q_total_ = d_sum;

    double tail = 0.0;
    for (const auto& f : factors) {
        tail += f.amplitude * kSurface[dim_] * std::pow(static_cast<double>(K_), -f.alpha) /
                f.alpha;
    }
    tail_estimate_ = tail;
    if (tail_estimate_ > tail_rel_tol * Q_total_) {
        std::ostringstream os;
        os << "LatticeKernel: truncation tail estimate " << tail_estimate_ << " exceeds "
           << tail_rel_tol << " * Q(h) = " << tail_rel_tol * Q_total_
           << " (increase trunc_K)";
        throw TruncationTooCoarse(os.str());
    }

    double q_off = 0.0;
    for (const double v : q_) q_off += v;
    q0_ = c1_ - q_off;
    q_[box_index(0, 0, 0)] = q0_;
}

std::size_t LatticeKernel::box_index(int kx, int ky, int kz) const {
    const std::size_t ext = static_cast<std::size_t>(2 * K_ + 1);
    std::size_t idx = static_cast<std::size_t>(kx + K_);
    if (dim_ >= 2) idx += static_cast<std::size_t>(ky + K_) * ext;
    if (dim_ >= 3) idx += static_cast<std::size_t>(kz + K_) * ext * ext;
    return idx;
}

double LatticeKernel::kernel_cf(std::span<const double> xi) const {
    double acc = 0.0;
    const double inv_scale = 1.0 / jump_scale_;
    const double x0 = h_ * (xi.size() > 0 ? xi[0] : 0.0);
    const double x1 = h_ * (xi.size() > 1 ? xi[1] : 0.0);
    const double x2 = h_ * (xi.size() > 2 ? xi[2] : 0.0);
    for_each_box_site(dim_, K_, [&](int kx, int ky, int kz, std::size_t idx) {
        if (kx == 0 && ky == 0 && kz == 0) return;
        const double w = q_[idx];
        if (w == 0.0) return;
        acc += w * (std::cos(kx * x0 + ky * x1 + kz * x2) - 1.0);
    });
    return acc * inv_scale;
}

double LatticeKernel::kernel_cf(double xi) const {
    return kernel_cf(std::span<const double>(&xi, 1));
}

double LatticeKernel::q_hat(std::span<const double> xi) const {
    return c1_ + jump_scale_ * kernel_cf(xi);
}

double LatticeKernel::q_hat(double xi) const {
    return q_hat(std::span<const double>(&xi, 1));
}

LatticeKernel build_kernel(const SpectralMeasure& rho, int dim_d, double h, double tau,
                           double beta, int trunc_K, double tail_rel_tol) {
    if (!(beta > 0.0) || beta > 1.0) {
        throw std::invalid_argument("build_kernel: beta must be in (0, 1]");
    }
    return LatticeKernel(rho, dim_d, h, tau, beta, beta, std::pow(tau, beta), trunc_K,
                         tail_rel_tol);
}

LatticeKernel build_kernel(const SpectralMeasure& rho, int dim_d, double h,
                           const CoefficientTable& coeffs, int trunc_K,
                           double tail_rel_tol) {
    return LatticeKernel(rho, dim_d, h, coeffs.tau(), coeffs.beta(), coeffs.c1(),
                         coeffs.jump_scale(), trunc_K, tail_rel_tol);
}

double p_hat(double alpha, int dim_d, double h, std::span<const double> xi, int trunc_K) {
    if (!(alpha > 0.0) || !(alpha < 2.0)) {
        throw std::invalid_argument("p_hat: alpha must be in (0, 2)");
    }
    if (dim_d < 1 || dim_d > 3) {
        throw std::invalid_argument("p_hat: dimension must be 1, 2 or 3");
    }
    if (trunc_K < 8) {
        throw std::invalid_argument("p_hat: trunc_K must be >= 8");
    }
    const double amp = b_alpha(alpha, dim_d) * std::pow(h, -alpha);
    const double s = dim_d + alpha;
    const double K2 = static_cast<double>(trunc_K) * static_cast<double>(trunc_K);
    const double x0 = h * (xi.size() > 0 ? xi[0] : 0.0);
    const double x1 = h * (xi.size() > 1 ? xi[1] : 0.0);
    const double x2 = h * (xi.size() > 2 ? xi[2] : 0.0);
    double acc = 0.0;
    for_each_box_site(dim_d, trunc_K, [&](int kx, int ky, int kz, std::size_t) {
        const double r2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky +
                          static_cast<double>(kz) * kz;
        if (r2 == 0.0 || r2 > K2) return;
        acc += std::exp(-0.5 * s * std::log(r2)) *
               (std::cos(kx * x0 + ky * x1 + kz * x2) - 1.0);
    });
    // The origin weight balances the full lattice, so the constant part of
    // the omitted tail sum_{|k|>K} |k|^{-s} belongs in the estimate. Its
    // oscillatory companion averages out once K h |xi| is well past one
    // period; below that the truncated balance is the better estimate
    // (and keeps p_hat(0) = 0 exactly).
    double norm = 0.0;
    for (const double c : xi) norm += c * c;
    norm = std::sqrt(norm);
    if (trunc_K * h * norm >= 2.0 * kPi) {
        double tail = 0.0;
        if (dim_d == 1) {
            // Euler-Maclaurin from K+1: integral + f/2 - f'/12
            const double a = trunc_K + 1.0;
            tail = 2.0 * (std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s) +
                          (s / 12.0) * std::pow(a, -s - 1.0));
        } else {
            tail = kSurface[dim_d] * std::pow(static_cast<double>(trunc_K), -alpha) / alpha;
        }
        acc -= tail;
    }
    return amp * acc;
}

double p_hat(double alpha, int dim_d, double h, double xi, int trunc_K) {
    return p_hat(alpha, dim_d, h, std::span<const double>(&xi, 1), trunc_K);
}

JumpProbabilities markov_probabilities(const LatticeKernel& kernel) {
    if (kernel.q0() < -1e-12) {
        std::ostringstream os;
        os << "markov_probabilities: p0 = " << kernel.q0()
           << " < 0; tau exceeds the stability bound";
        throw StabilityViolation(os.str());
    }
    JumpProbabilities jp;
    jp.dim = kernel.dim();
    jp.trunc_K = kernel.trunc_K();
    jp.p = kernel.box();
    jp.p0 = std::max(kernel.q0(), 0.0); // clamp boundary-saturation roundoff
    jp.p[kernel.box_index(0, 0, 0)] = jp.p0;
    double s = 0.0;
    for (const double v : jp.p) s += v;
    jp.sum = s;
    return jp;
}

namespace detail {

double lattice_q_total(const SpectralMeasure& rho, int dim_d, double h, int trunc_K) {
    const auto factors = node_factors(rho, dim_d, h);
    const double K2 = static_cast<double>(trunc_K) * static_cast<double>(trunc_K);
    double d_sum = 0.0;
    for_each_box_site(dim_d, trunc_K, [&](int kx, int ky, int kz, std::size_t) {
        const double r2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky +
                          static_cast<double>(kz) * kz;
        if (r2 == 0.0 || r2 > K2) return;
        const double lr = 0.5 * std::log(r2);
        for (const auto& f : factors) d_sum += f.amplitude * std::exp(-f.exponent * lr);
    });
    return d_sum;
}

double tau_max_from_q(double q_total, double beta, SchemeKind variant) {
    if (!(q_total > 0.0)) {
        throw std::invalid_argument("tau_max_from_q: Q(h) must be > 0");
    }
    if (variant == SchemeKind::Liu || variant == SchemeKind::DistributedLiu) {
        if (!(beta > 0.0) || !(beta < 1.0)) {
            throw std::invalid_argument("tau_max_from_q: quadrature variant needs beta in (0,1)");
        }
        const double num = 2.0 - std::pow(2.0, 1.0 - beta);
        return std::pow(num / (gamma_fn(2.0 - beta) * q_total), 1.0 / beta);
    }
    if (!(beta > 0.0) || beta > 1.0) {
        throw std::invalid_argument("tau_max_from_q: beta must be in (0, 1]");
    }
    return std::pow(beta / q_total, 1.0 / beta);
}

} // namespace detail

double stability_bound(const SpectralMeasure& rho, int dim_d, double h, int trunc_K,
                       double beta, SchemeKind variant) {
    return detail::tau_max_from_q(detail::lattice_q_total(rho, dim_d, h, trunc_K), beta,
                                  variant);
}

double distributed_stability_bound(const SpectralMeasure& rho, int dim_d, double h,
                                   int trunc_K, const TimeMeasure& mu,
                                   SchemeKind variant) {
    if (variant != SchemeKind::GL && variant != SchemeKind::Liu) {
        throw std::invalid_argument("distributed_stability_bound: variant must be GL or Liu");
    }
    const double Q = detail::lattice_q_total(rho, dim_d, h, trunc_K);
    double c1_star = 0.0;
    for (const auto& node : mu.nodes()) {
        c1_star += node.weight * (variant == SchemeKind::GL
                                      ? node.order
                                      : 2.0 - std::pow(2.0, 1.0 - node.order));
    }
    auto a_star = [&](double tau) {
        double a = 0.0;
        for (const auto& node : mu.nodes()) {
            if (variant == SchemeKind::GL) {
                a += node.weight * std::pow(tau, -node.order);
            } else {
                a += node.weight / (std::pow(tau, node.order) * gamma_fn(2.0 - node.order));
            }
        }
        return a;
    };
    // q0 >= 0  <=>  a*(tau) >= Q/c1*; a* is strictly decreasing in tau
    auto admissible = [&](double tau) { return c1_star * a_star(tau) >= Q; };
    double lo = 1e-14, hi = 1e-14;
    while (admissible(hi) && hi < 1e12) {
        lo = hi;
        hi *= 2.0;
    }
    if (hi >= 1e12) return 1e12;
    if (!admissible(lo)) return 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (admissible(mid) ? lo : hi) = mid;
    }
    return lo;
}

} // namespace ctrw
