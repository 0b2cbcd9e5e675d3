#include "ctrw/measures.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace ctrw {

namespace {

std::vector<WeightedNode> concatenate(const std::vector<WeightedNode>& a,
                                      const std::vector<WeightedNode>& b) {
    std::vector<WeightedNode> all;
    all.reserve(a.size() + b.size());
    all.insert(all.end(), a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    return all;
}

double mass_of(const std::vector<WeightedNode>& nodes) {
    double m = 0.0;
    for (const auto& n : nodes) m += n.weight;
    return m;
}

void check_nodes(const std::vector<WeightedNode>& nodes, double lo, double hi,
                 bool closed_hi, const char* what) {
    for (const auto& n : nodes) {
        const bool order_ok = n.order > lo && (closed_hi ? n.order <= hi : n.order < hi);
        if (!order_ok) {
            throw std::invalid_argument(std::string(what) + ": order out of range");
        }
        if (!(n.weight > 0.0) || !std::isfinite(n.weight)) {
            throw std::invalid_argument(std::string(what) + ": weight must be > 0");
        }
    }
}

nlohmann::json nodes_to_json(const std::vector<WeightedNode>& nodes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : nodes) arr.push_back({n.order, n.weight});
    return arr;
}

std::vector<WeightedNode> nodes_from_json(const nlohmann::json& arr) {
    std::vector<WeightedNode> nodes;
    for (const auto& item : arr) {
        nodes.push_back({item.at(0).get<double>(), item.at(1).get<double>()});
    }
    return nodes;
}

} // namespace

SpectralMeasure::SpectralMeasure(std::vector<WeightedNode> atoms,
                                 std::vector<WeightedNode> density_nodes)
    : atoms_(std::move(atoms)), density_nodes_(std::move(density_nodes)) {
    check_nodes(atoms_, 0.0, 2.0, false, "SpectralMeasure");
    check_nodes(density_nodes_, 0.0, 2.0, false, "SpectralMeasure");
    all_ = concatenate(atoms_, density_nodes_);
    if (all_.empty()) {
        throw std::invalid_argument("SpectralMeasure: measure must have positive mass");
    }
    total_mass_ = mass_of(all_);
}

std::string SpectralMeasure::to_json() const {
    nlohmann::json j;
    j["atoms"] = nodes_to_json(atoms_);
    j["density_nodes"] = nodes_to_json(density_nodes_);
    return j.dump();
}

SpectralMeasure SpectralMeasure::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    return SpectralMeasure(nodes_from_json(j.at("atoms")),
                           nodes_from_json(j.value("density_nodes", nlohmann::json::array())));
}

TimeMeasure::TimeMeasure(std::vector<WeightedNode> atoms,
                         std::vector<WeightedNode> density_nodes)
    : atoms_(std::move(atoms)), density_nodes_(std::move(density_nodes)) {
    check_nodes(atoms_, 0.0, 1.0, true, "TimeMeasure");
    check_nodes(density_nodes_, 0.0, 1.0, true, "TimeMeasure");
    all_ = concatenate(atoms_, density_nodes_);
    if (all_.empty()) {
        throw std::invalid_argument("TimeMeasure: measure must have positive mass");
    }
    total_mass_ = mass_of(all_);
}

bool TimeMeasure::has_order_one() const {
    for (const auto& n : all_) {
        if (n.order == 1.0) return true;
    }
    return false;
}

std::string TimeMeasure::to_json() const {
    nlohmann::json j;
    j["atoms"] = nodes_to_json(atoms_);
    j["density_nodes"] = nodes_to_json(density_nodes_);
    return j.dump();
}

TimeMeasure TimeMeasure::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    return TimeMeasure(nodes_from_json(j.at("atoms")),
                       nodes_from_json(j.value("density_nodes", nlohmann::json::array())));
}

SpectralMeasure make_atomic_measure(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("make_atomic_measure: empty atom list");
    }
    std::vector<WeightedNode> atoms;
    atoms.reserve(pairs.size());
    for (const auto& [alpha, weight] : pairs) atoms.push_back({alpha, weight});
    return SpectralMeasure(std::move(atoms), {});
}

TimeMeasure make_atomic_time_measure(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("make_atomic_time_measure: empty atom list");
    }
    std::vector<WeightedNode> atoms;
    atoms.reserve(pairs.size());
    for (const auto& [beta, weight] : pairs) atoms.push_back({beta, weight});
    return TimeMeasure(std::move(atoms), {});
}

namespace detail {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

namespace {

std::vector<WeightedNode> density_nodes_on(const std::function<double(double)>& density,
                                           double a, double b, int n_nodes,
                                           const char* what) {
    if (!(a < b)) throw std::invalid_argument(std::string(what) + ": requires a < b");
    if (n_nodes < 1) throw std::invalid_argument(std::string(what) + ": n_nodes >= 1");
    std::vector<double> x, w;
    gauss_legendre(n_nodes, x, w);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<WeightedNode> nodes;
    nodes.reserve(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        const double order = mid + half * x[i];
        const double dens = density(order);
        if (dens < 0.0) {
            throw std::invalid_argument(std::string(what) + ": negative density value");
        }
        if (dens > 0.0) nodes.push_back({order, half * w[i] * dens});
    }
    if (nodes.empty()) {
        throw std::invalid_argument(std::string(what) + ": density vanishes on all nodes");
    }
    return nodes;
}

} // namespace
} // namespace detail

SpectralMeasure make_density_measure(const std::function<double(double)>& density,
                                     double a, double b, int n_nodes) {
    if (!(a > 0.0) || !(b < 2.0)) {
        throw std::invalid_argument("make_density_measure: support must lie inside (0, 2)");
    }
    return SpectralMeasure({}, detail::density_nodes_on(density, a, b, n_nodes,
                                                        "make_density_measure"));
}

TimeMeasure make_density_time_measure(const std::function<double(double)>& density,
                                      double a, double b, int n_nodes) {
    if (!(a > 0.0) || !(b <= 1.0)) {
        throw std::invalid_argument("make_density_time_measure: support must lie inside (0, 1]");
    }
    return TimeMeasure({}, detail::density_nodes_on(density, a, b, n_nodes,
                                                    "make_density_time_measure"));
}

double symbol_psi(const SpectralMeasure& rho, std::span<const double> xi) {
    double norm2 = 0.0;
    for (const double c : xi) norm2 += c * c;
    if (norm2 == 0.0) return 0.0;
    const double r = std::sqrt(norm2);
    double psi = 0.0;
    for (const auto& n : rho.nodes()) {
        psi -= n.weight * std::pow(r, n.order);
    }
    return psi;
}

double symbol_psi(const SpectralMeasure& rho, double xi) {
    return symbol_psi(rho, std::span<const double>(&xi, 1));
}

} // namespace ctrw
