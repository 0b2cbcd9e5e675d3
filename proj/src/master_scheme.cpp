#include "ctrw/master_scheme.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

void check_compatible(const CoefficientTable& coeffs, const LatticeKernel& kernel) {
    const double tau = coeffs.tau();
    if (std::fabs(kernel.tau() - tau) > 1e-12 * tau ||
        std::fabs(kernel.c1() - coeffs.c1()) > 1e-12 * std::fabs(coeffs.c1()) ||
        std::fabs(kernel.jump_scale() - coeffs.jump_scale()) >
            1e-12 * coeffs.jump_scale()) {
        throw std::invalid_argument(
            "step: kernel and coefficient table disagree on tau / c1 / jump scale");
    }
}

// ---- 1-d kernels -----------------------------------------------------------

// Symmetric-pair form over a zero-padded copy: each q_k (k >= 1) multiplies
// u_{j-k} + u_{j+k}, so mirrored outputs are built from the same operations
// and symmetric layers stay bitwise symmetric.
void convolve_1d(const std::vector<double>& q, int K, const std::vector<double>& u, int J,
                 std::vector<double>& out) {
    const int W = 2 * J;
    std::vector<double> up(static_cast<size_t>(W + 2 * K) + 1, 0.0);
    for (int i = 0; i <= W; ++i) up[static_cast<size_t>(i + K)] = u[static_cast<size_t>(i)];
    const double* qq = q.data() + K;
    for (int j = 0; j <= W; ++j) {
        const double* c = up.data() + K + j;
        double acc = qq[0] * c[0];
        for (int k = 1; k <= K; ++k) acc += qq[k] * (c[-k] + c[k]);
        out[static_cast<size_t>(j)] += acc;
    }
}

double outflow_1d(const std::vector<double>& q, int K, const std::vector<double>& u, int J) {
    const int W = 2 * J;
    // suffix[i] = sum_{j >= i} u_j, prefix[i] = sum_{j <= i} u_j (flat indices)
    std::vector<double> suffix(static_cast<size_t>(W) + 2, 0.0);
    std::vector<double> prefix(static_cast<size_t>(W) + 2, 0.0);
    for (int i = W; i >= 0; --i) {
        suffix[static_cast<size_t>(i)] = suffix[static_cast<size_t>(i) + 1] + u[static_cast<size_t>(i)];
    }
    prefix[0] = 0.0; // prefix shifted by one: prefix[i+1] = sum_{j <= i}
    for (int i = 0; i <= W; ++i) {
        prefix[static_cast<size_t>(i) + 1] = prefix[static_cast<size_t>(i)] + u[static_cast<size_t>(i)];
    }
    double loss = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double qr = q[static_cast<size_t>(K + k)]; // jump +k exits on the right
        const double ql = q[static_cast<size_t>(K - k)]; // jump -k exits on the left
        const int cut = std::max(0, W - k + 1);
        loss += qr * suffix[static_cast<size_t>(cut)];
        loss += ql * prefix[static_cast<size_t>(std::min(k, W + 1))];
    }
    return loss;
}

// ---- 2-d / 3-d kernels -----------------------------------------------------

void convolve_2d(const std::vector<double>& q, int K, const std::vector<double>& u, int J,
                 std::vector<double>& out) {
    const int eq = 2 * K + 1;
    const int eu = 2 * J + 1;
    const int ep = eu + 2 * K;
    std::vector<double> up(static_cast<size_t>(ep) * ep, 0.0);
    for (int y = 0; y < eu; ++y) {
        for (int x = 0; x < eu; ++x) {
            up[static_cast<size_t>(y + K) * ep + (x + K)] =
                u[static_cast<size_t>(y) * eu + x];
        }
    }
    // pair each offset with its negation (q is even): k runs over the
    // lexicographic upper half ky > 0, or ky == 0 and kx > 0
    for (int jy = 0; jy < eu; ++jy) {
        for (int jx = 0; jx < eu; ++jx) {
            const double* c = up.data() + static_cast<size_t>(jy + K) * ep + (jx + K);
            double acc = q[static_cast<size_t>(K) * eq + K] * c[0];
            for (int kx = 1; kx <= K; ++kx) {
                const double w = q[static_cast<size_t>(K) * eq + (K + kx)];
                if (w != 0.0) acc += w * (c[-kx] + c[kx]);
            }
            for (int ky = 1; ky <= K; ++ky) {
                const double* qrow = q.data() + static_cast<size_t>(K + ky) * eq + K;
                const double* cm = c - static_cast<size_t>(ky) * ep;
                const double* cp = c + static_cast<size_t>(ky) * ep;
                for (int kx = -K; kx <= K; ++kx) {
                    const double w = qrow[kx];
                    if (w != 0.0) acc += w * (cm[-kx] + cp[kx]);
                }
            }
            out[static_cast<size_t>(jy) * eu + jx] += acc;
        }
    }
}

double outflow_2d(const std::vector<double>& q, int K, const std::vector<double>& u, int J) {
    const int eu = 2 * J + 1;
    // summed-area table: sat[(y+1)*(eu+1) + (x+1)] = sum over [0..x] x [0..y]
    std::vector<double> sat(static_cast<size_t>(eu + 1) * (eu + 1), 0.0);
    for (int y = 0; y < eu; ++y) {
        double row = 0.0;
        for (int x = 0; x < eu; ++x) {
            row += u[static_cast<size_t>(y) * eu + x];
            sat[static_cast<size_t>(y + 1) * (eu + 1) + (x + 1)] =
                sat[static_cast<size_t>(y) * (eu + 1) + (x + 1)] + row;
        }
    }
    auto rect = [&](int x0, int x1, int y0, int y1) -> double {
        if (x0 > x1 || y0 > y1) return 0.0;
        return sat[static_cast<size_t>(y1 + 1) * (eu + 1) + (x1 + 1)] -
               sat[static_cast<size_t>(y0) * (eu + 1) + (x1 + 1)] -
               sat[static_cast<size_t>(y1 + 1) * (eu + 1) + x0] +
               sat[static_cast<size_t>(y0) * (eu + 1) + x0];
    };
    const double total = rect(0, eu - 1, 0, eu - 1);
    const int eq = 2 * K + 1;
    double loss = 0.0;
    for (int ky = -K; ky <= K; ++ky) {
        for (int kx = -K; kx <= K; ++kx) {
            const double w = q[static_cast<size_t>(ky + K) * eq + (kx + K)];
            if (w == 0.0 || (kx == 0 && ky == 0)) continue;
            // sites whose image j+k stays inside: j in [-J-kx, J-kx] x [-J-ky, J-ky]
            const int x0 = std::max(0, -kx);
            const int x1 = std::min(eu - 1, eu - 1 - kx);
            const int y0 = std::max(0, -ky);
            const int y1 = std::min(eu - 1, eu - 1 - ky);
            loss += w * (total - rect(x0, x1, y0, y1));
        }
    }
    return loss;
}

void convolve_3d(const std::vector<double>& q, int K, const std::vector<double>& u, int J,
                 std::vector<double>& out) {
    const int eq = 2 * K + 1;
    const int eu = 2 * J + 1;
    const int ep = eu + 2 * K;
    std::vector<double> up(static_cast<size_t>(ep) * ep * ep, 0.0);
    for (int z = 0; z < eu; ++z)
        for (int y = 0; y < eu; ++y)
            for (int x = 0; x < eu; ++x) {
                up[(static_cast<size_t>(z + K) * ep + (y + K)) * ep + (x + K)] =
                    u[(static_cast<size_t>(z) * eu + y) * eu + x];
            }
    auto qat = [&](int kx, int ky, int kz) {
        return q[(static_cast<size_t>(kz + K) * eq + static_cast<size_t>(ky + K)) * eq +
                 static_cast<size_t>(kx + K)];
    };
    for (int jz = 0; jz < eu; ++jz)
        for (int jy = 0; jy < eu; ++jy)
            for (int jx = 0; jx < eu; ++jx) {
                const double* c =
                    up.data() + (static_cast<size_t>(jz + K) * ep + (jy + K)) * ep + (jx + K);
                double acc = qat(0, 0, 0) * c[0];
                for (int kx = 1; kx <= K; ++kx) {
                    const double w = qat(kx, 0, 0);
                    if (w != 0.0) acc += w * (c[-kx] + c[kx]);
                }
                for (int ky = 1; ky <= K; ++ky)
                    for (int kx = -K; kx <= K; ++kx) {
                        const double w = qat(kx, ky, 0);
                        if (w == 0.0) continue;
                        const long off = static_cast<long>(ky) * ep + kx;
                        acc += w * (c[-off] + c[off]);
                    }
                for (int kz = 1; kz <= K; ++kz)
                    for (int ky = -K; ky <= K; ++ky)
                        for (int kx = -K; kx <= K; ++kx) {
                            const double w = qat(kx, ky, kz);
                            if (w == 0.0) continue;
                            const long off =
                                (static_cast<long>(kz) * ep + ky) * ep + kx;
                            acc += w * (c[-off] + c[off]);
                        }
                out[(static_cast<size_t>(jz) * eu + jy) * eu + jx] += acc;
            }
}

double outflow_3d(const std::vector<double>& q, int K, const std::vector<double>& u, int J) {
    const int eu = 2 * J + 1;
    const int e1 = eu + 1;
    std::vector<double> sat(static_cast<size_t>(e1) * e1 * e1, 0.0);
    auto sat_at = [&](int x, int y, int z) -> double& {
        return sat[(static_cast<size_t>(z) * e1 + y) * e1 + x];
    };
    for (int z = 0; z < eu; ++z)
        for (int y = 0; y < eu; ++y)
            for (int x = 0; x < eu; ++x) {
                sat_at(x + 1, y + 1, z + 1) =
                    u[(static_cast<size_t>(z) * eu + y) * eu + x] + sat_at(x, y + 1, z + 1) +
                    sat_at(x + 1, y, z + 1) + sat_at(x + 1, y + 1, z) - sat_at(x, y, z + 1) -
                    sat_at(x, y + 1, z) - sat_at(x + 1, y, z) + sat_at(x, y, z);
            }
    auto boxsum = [&](int x0, int x1, int y0, int y1, int z0, int z1) -> double {
        if (x0 > x1 || y0 > y1 || z0 > z1) return 0.0;
        ++x1, ++y1, ++z1;
        return sat_at(x1, y1, z1) - sat_at(x0, y1, z1) - sat_at(x1, y0, z1) -
               sat_at(x1, y1, z0) + sat_at(x0, y0, z1) + sat_at(x0, y1, z0) +
               sat_at(x1, y0, z0) - sat_at(x0, y0, z0);
    };
    const double total = boxsum(0, eu - 1, 0, eu - 1, 0, eu - 1);
    const int eq = 2 * K + 1;
    double loss = 0.0;
    for (int kz = -K; kz <= K; ++kz)
        for (int ky = -K; ky <= K; ++ky)
            for (int kx = -K; kx <= K; ++kx) {
                const double w =
                    q[(static_cast<size_t>(kz + K) * eq + static_cast<size_t>(ky + K)) * eq +
                      (kx + K)];
                if (w == 0.0 || (kx == 0 && ky == 0 && kz == 0)) continue;
                const int x0 = std::max(0, -kx), x1 = std::min(eu - 1, eu - 1 - kx);
                const int y0 = std::max(0, -ky), y1 = std::min(eu - 1, eu - 1 - ky);
                const int z0 = std::max(0, -kz), z1 = std::min(eu - 1, eu - 1 - kz);
                loss += w * (total - boxsum(x0, x1, y0, y1, z0, z1));
            }
    return loss;
}

} // namespace

GridLayerHistory::GridLayerHistory(int dim_d, double h, double tau, int window_J)
    : dim_(dim_d), J_(window_J), h_(h), tau_(tau) {
    if (dim_d < 1 || dim_d > 3) {
        throw std::invalid_argument("GridLayerHistory: dimension must be 1, 2 or 3");
    }
    if (window_J < 1) {
        throw std::invalid_argument("GridLayerHistory: window_J must be >= 1");
    }
    if (!(h > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("GridLayerHistory: h and tau must be > 0");
    }
    std::size_t size = 1;
    for (int i = 0; i < dim_; ++i) size *= static_cast<std::size_t>(2 * J_ + 1);
    std::vector<double> delta(size, 0.0);
    delta[site_index(0, 0, 0)] = 1.0;
    layers_.push_back(std::move(delta));
    deficit_.push_back(0.0);
}

std::size_t GridLayerHistory::site_index(int jx, int jy, int jz) const {
    const std::size_t ext = static_cast<std::size_t>(2 * J_ + 1);
    std::size_t idx = static_cast<std::size_t>(jx + J_);
    if (dim_ >= 2) idx += static_cast<std::size_t>(jy + J_) * ext;
    if (dim_ >= 3) idx += static_cast<std::size_t>(jz + J_) * ext * ext;
    return idx;
}

double GridLayerHistory::mass(int n) const {
    double m = 0.0;
    for (const double v : layers_[static_cast<size_t>(n)]) m += v;
    return m;
}

double GridLayerHistory::conservation_defect(int n) const {
    return std::fabs(mass(n) + deficit_[static_cast<size_t>(n)] - 1.0);
}

double GridLayerHistory::max_conservation_defect() const {
    double worst = 0.0;
    for (int n = 0; n < layer_count(); ++n) worst = std::max(worst, conservation_defect(n));
    return worst;
}

GridLayerHistory init_grid(int dim_d, double h, double tau, int window_J) {
    return GridLayerHistory(dim_d, h, tau, window_J);
}

void step(GridLayerHistory& state, const CoefficientTable& coeffs,
          const LatticeKernel& kernel) {
    if (kernel.q0() < -1e-12) {
        std::ostringstream os;
        os << "step: q0 = " << kernel.q0() << " < 0 violates the stability bound";
        throw StabilityViolation(os.str());
    }
    if (kernel.dim() != state.dim()) {
        throw std::invalid_argument("step: kernel dimension does not match the grid");
    }
    check_compatible(coeffs, kernel);
    const int n = state.layer_count() - 1;
    if (n > coeffs.horizon()) {
        throw HistoryMissing("step: coefficient table horizon exhausted");
    }

    const auto& layers = state.layers_;
    std::vector<double> next(state.window_size(), 0.0);

    // memory branches: gamma~_n on the initial layer, c_m on layer n+1-m
    const double w0 = coeffs.memory_weight(n);
    const std::vector<double>& u0 = layers.front();
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = w0 * u0[i];
    for (int m = 2; m <= n; ++m) {
        const double cm = coeffs.c(m);
        const std::vector<double>& um = layers[static_cast<size_t>(n + 1 - m)];
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += cm * um[i];
    }

    // Markov branch: jump convolution of the current layer
    const std::vector<double>& ucur = layers[static_cast<size_t>(n)];
    double loss = 0.0;
    switch (state.dim()) {
        case 1:
            convolve_1d(kernel.box(), kernel.trunc_K(), ucur, state.window_J(), next);
            loss = outflow_1d(kernel.box(), kernel.trunc_K(), ucur, state.window_J());
            break;
        case 2:
            convolve_2d(kernel.box(), kernel.trunc_K(), ucur, state.window_J(), next);
            loss = outflow_2d(kernel.box(), kernel.trunc_K(), ucur, state.window_J());
            break;
        default:
            convolve_3d(kernel.box(), kernel.trunc_K(), ucur, state.window_J(), next);
            loss = outflow_3d(kernel.box(), kernel.trunc_K(), ucur, state.window_J());
            break;
    }

    state.layers_.push_back(std::move(next));
    // the deficit obeys the recursion itself: mass missing from past layers
    // is re-missed by the memory branches, so
    //   B_{n+1} = c_1 B_n + sum_{m=2}^{n} c_m B_{n+1-m} + outflow_n
    double deficit = coeffs.c1() * state.deficit_[static_cast<size_t>(n)] + loss;
    for (int m = 2; m <= n; ++m) {
        deficit += coeffs.c(m) * state.deficit_[static_cast<size_t>(n + 1 - m)];
    }
    state.deficit_.push_back(deficit);
}

void run(GridLayerHistory& state, const CoefficientTable& coeffs,
         const LatticeKernel& kernel, int n_steps) {
    if (n_steps < 0) throw std::invalid_argument("run: n_steps must be >= 0");
    for (int i = 0; i < n_steps; ++i) step(state, coeffs, kernel);
}

std::complex<double> grid_cf(const GridLayerHistory& state, int n,
                             std::span<const double> xi) {
    const double x0 = state.h() * (xi.size() > 0 ? xi[0] : 0.0);
    const double x1 = state.h() * (xi.size() > 1 ? xi[1] : 0.0);
    const double x2 = state.h() * (xi.size() > 2 ? xi[2] : 0.0);
    const auto u = state.layer(n);
    const int J = state.window_J();
    double re = 0.0, im = 0.0;
    if (state.dim() == 1) {
        for (int j = -J; j <= J; ++j) {
            const double v = u[static_cast<size_t>(j + J)];
            if (v == 0.0) continue;
            re += v * std::cos(j * x0);
            im += v * std::sin(j * x0);
        }
    } else if (state.dim() == 2) {
        std::size_t idx = 0;
        for (int jy = -J; jy <= J; ++jy)
            for (int jx = -J; jx <= J; ++jx, ++idx) {
                const double v = u[idx];
                if (v == 0.0) continue;
                const double ph = jx * x0 + jy * x1;
                re += v * std::cos(ph);
                im += v * std::sin(ph);
            }
    } else {
        std::size_t idx = 0;
        for (int jz = -J; jz <= J; ++jz)
            for (int jy = -J; jy <= J; ++jy)
                for (int jx = -J; jx <= J; ++jx, ++idx) {
                    const double v = u[idx];
                    if (v == 0.0) continue;
                    const double ph = jx * x0 + jy * x1 + jz * x2;
                    re += v * std::cos(ph);
                    im += v * std::sin(ph);
                }
    }
    return {re, im};
}

std::complex<double> grid_cf(const GridLayerHistory& state, int n, double xi) {
    return grid_cf(state, n, std::span<const double>(&xi, 1));
}

std::vector<double> cf_recursion(const CoefficientTable& coeffs, double q_hat,
                                 int n_layers) {
    if (n_layers < 0) throw std::invalid_argument("cf_recursion: n_layers must be >= 0");
    if (n_layers > coeffs.horizon() + 1) {
        throw HistoryMissing("cf_recursion: coefficient table horizon too short");
    }
    std::vector<double> u(static_cast<size_t>(n_layers) + 1, 0.0);
    u[0] = 1.0;
    for (int n = 0; n < n_layers; ++n) {
        double v = coeffs.memory_weight(n) + q_hat * u[static_cast<size_t>(n)];
        for (int m = 2; m <= n; ++m) v += coeffs.c(m) * u[static_cast<size_t>(n + 1 - m)];
        u[static_cast<size_t>(n) + 1] = v;
    }
    return u;
}

} // namespace ctrw
