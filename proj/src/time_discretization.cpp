#include "ctrw/time_discretization.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ctrw/errors.hpp"
#include "ctrw/special_functions.hpp"

namespace ctrw {

namespace {

void fill_gl(double beta, int n, std::vector<double>& c, std::vector<double>& gamma) {
    c.assign(static_cast<size_t>(n) + 1, 0.0);
    gamma.assign(static_cast<size_t>(n) + 1, 0.0);
    gamma[0] = 1.0;
    if (n >= 1) {
        c[1] = beta;
        for (int l = 1; l < n; ++l) {
            c[static_cast<size_t>(l) + 1] = c[static_cast<size_t>(l)] * (l - beta) / (l + 1.0);
        }
        for (int m = 1; m <= n; ++m) {
            gamma[static_cast<size_t>(m)] =
                gamma[static_cast<size_t>(m) - 1] - c[static_cast<size_t>(m)];
        }
    }
}

void fill_liu(double beta, int n, std::vector<double>& c, std::vector<double>& gamma) {
    c.assign(static_cast<size_t>(n) + 1, 0.0);
    gamma.assign(static_cast<size_t>(n) + 1, 0.0);
    const double e = 1.0 - beta;
    for (int m = 0; m <= n; ++m) {
        gamma[static_cast<size_t>(m)] = std::pow(m + 1.0, e) - std::pow(static_cast<double>(m), e);
    }
    for (int k = 1; k <= n; ++k) {
        c[static_cast<size_t>(k)] = gamma[static_cast<size_t>(k) - 1] - gamma[static_cast<size_t>(k)];
    }
}

} // namespace

const char* scheme_kind_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::GL: return "GL";
        case SchemeKind::Liu: return "Liu";
        case SchemeKind::DistributedGL: return "DistributedGL";
        case SchemeKind::DistributedLiu: return "DistributedLiu";
    }
    return "?";
}

CoefficientTable::CoefficientTable(SchemeKind kind, double beta, std::optional<TimeMeasure> mu,
                                   int horizon, double tau, double a_tau,
                                   std::vector<double> c, std::vector<double> gamma)
    : kind_(kind),
      beta_(beta),
      mu_(std::move(mu)),
      horizon_(horizon),
      tau_(tau),
      a_tau_(a_tau),
      c_(std::move(c)),
      gamma_(std::move(gamma)) {}

CoefficientTable gl_coefficients(double beta, int n, double tau) {
    if (!(beta > 0.0) || beta > 1.0) {
        throw std::invalid_argument("gl_coefficients: beta must be in (0, 1]");
    }
    if (n < 1) throw std::invalid_argument("gl_coefficients: n must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("gl_coefficients: tau must be > 0");
    std::vector<double> c, gamma;
    fill_gl(beta, n, c, gamma);
    return CoefficientTable(SchemeKind::GL, beta, std::nullopt, n, tau,
                            std::pow(tau, -beta), std::move(c), std::move(gamma));
}

CoefficientTable liu_coefficients(double beta, int n, double tau) {
    if (!(beta > 0.0) || !(beta < 1.0)) {
        throw std::invalid_argument("liu_coefficients: beta must be in (0, 1)");
    }
    if (n < 1) throw std::invalid_argument("liu_coefficients: n must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("liu_coefficients: tau must be > 0");
    std::vector<double> c, gamma;
    fill_liu(beta, n, c, gamma);
    const double a_tau = 1.0 / (std::pow(tau, beta) * gamma_fn(2.0 - beta));
    return CoefficientTable(SchemeKind::Liu, beta, std::nullopt, n, tau, a_tau,
                            std::move(c), std::move(gamma));
}

CoefficientTable distributed_coefficients(const TimeMeasure& mu, SchemeKind variant,
                                          int n, double tau) {
    if (variant != SchemeKind::GL && variant != SchemeKind::Liu) {
        throw std::invalid_argument("distributed_coefficients: variant must be GL or Liu");
    }
    if (n < 1) throw std::invalid_argument("distributed_coefficients: n must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("distributed_coefficients: tau must be > 0");
    if (variant == SchemeKind::Liu && mu.has_order_one()) {
        throw std::invalid_argument(
            "distributed_coefficients: Liu variant requires supp mu inside (0, 1)");
    }
    std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
    std::vector<double> gamma(static_cast<size_t>(n) + 1, 0.0);
    double a_tau = 0.0;
    std::vector<double> cb, gb;
    for (const auto& node : mu.nodes()) {
        if (variant == SchemeKind::GL) {
            fill_gl(node.order, n, cb, gb);
            a_tau += node.weight * std::pow(tau, -node.order);
        } else {
            fill_liu(node.order, n, cb, gb);
            a_tau += node.weight / (std::pow(tau, node.order) * gamma_fn(2.0 - node.order));
        }
        for (size_t i = 0; i < cb.size(); ++i) c[i] += node.weight * cb[i];
        for (size_t i = 0; i < gb.size(); ++i) gamma[i] += node.weight * gb[i];
    }
    const auto kind = variant == SchemeKind::GL ? SchemeKind::DistributedGL
                                                : SchemeKind::DistributedLiu;
    return CoefficientTable(kind, std::numeric_limits<double>::quiet_NaN(), mu, n, tau,
                            a_tau, std::move(c), std::move(gamma));
}

double caputo_apply(const CoefficientTable& table, std::span<const double> samples,
                    double tau) {
    if (samples.size() < 2) {
        throw std::invalid_argument("caputo_apply: need at least two samples");
    }
    const int n = static_cast<int>(samples.size()) - 1;
    if (n > table.horizon()) {
        throw HistoryMissing("caputo_apply: table horizon shorter than sample count");
    }
    if (std::fabs(tau - table.tau()) > 1e-12 * table.tau()) {
        throw std::invalid_argument("caputo_apply: sample spacing does not match the table");
    }
    const bool quadrature = table.kind() == SchemeKind::Liu ||
                            table.kind() == SchemeKind::DistributedLiu;
    double acc = 0.0;
    if (quadrature) {
        // a(tau) sum_k gamma_k (f(t_{n-k}) - f(t_{n-k-1}))
        for (int k = 0; k < n; ++k) {
            acc += table.gamma(k) *
                   (samples[static_cast<size_t>(n - k)] - samples[static_cast<size_t>(n - k - 1)]);
        }
    } else {
        // a(tau) [ (f_n - f_0) - sum_m c_m (f_{n-m} - f_0) ]
        acc = samples[static_cast<size_t>(n)] - samples[0];
        for (int m = 1; m <= n; ++m) {
            acc -= table.c(m) * (samples[static_cast<size_t>(n - m)] - samples[0]);
        }
    }
    return table.a_tau() * acc;
}

std::string CoefficientTable::to_json() const {
    nlohmann::json j;
    j["scheme_kind"] = scheme_kind_name(kind_);
    if (mu_) {
        j["mu"] = nlohmann::json::parse(mu_->to_json());
    } else {
        j["beta"] = beta_;
    }
    j["horizon"] = horizon_;
    j["tau"] = tau_;
    j["a_tau"] = a_tau_;
    j["c"] = std::vector<double>(c_.begin() + 1, c_.end());
    j["gamma"] = gamma_;
    return j.dump(2);
}

std::string CoefficientTable::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "l,c_l,gamma_l\n";
    os << 0 << "," << 0.0 << "," << gamma_[0] << "\n";
    for (int l = 1; l <= horizon_; ++l) {
        os << l << "," << c_[static_cast<size_t>(l)] << ","
           << gamma_[static_cast<size_t>(l)] << "\n";
    }
    return os.str();
}

} // namespace ctrw
