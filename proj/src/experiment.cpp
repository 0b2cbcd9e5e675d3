#include "ctrw/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double min_alpha(const SpectralMeasure& rho) {
    double a = 2.0;
    for (const auto& n : rho.nodes()) a = std::min(a, n.order);
    return a;
}

CoefficientTable make_table(const ExperimentConfig& cfg, int n, double tau) {
    if (cfg.mu) return distributed_coefficients(*cfg.mu, cfg.variant, n, tau);
    if (cfg.variant == SchemeKind::Liu) return liu_coefficients(cfg.beta, n, tau);
    return gl_coefficients(cfg.beta, n, tau);
}

double bound_for(const ExperimentConfig& cfg, double h, int K) {
    if (cfg.mu) {
        return distributed_stability_bound(*cfg.rho, cfg.dim_d, h, K, *cfg.mu, cfg.variant);
    }
    return stability_bound(*cfg.rho, cfg.dim_d, h, K, cfg.beta, cfg.variant);
}

/// Single-atom mu reduces to a plain fractional order; otherwise no exact
/// transform exists.
std::optional<double> effective_beta(const ExperimentConfig& cfg) {
    if (!cfg.mu) return cfg.beta;
    if (cfg.mu->nodes().size() == 1) return cfg.mu->nodes().front().order;
    return std::nullopt;
}

struct Level {
    double h;
    double tau;
    double tau_max;
    int n_steps;
    int K;
    int J;
};

Level plan_level(const ExperimentConfig& cfg, double h) {
    Level lv;
    lv.h = h;
    lv.K = cfg.trunc_K > 0 ? cfg.trunc_K : cfg.auto_trunc_K(h);
    lv.J = cfg.auto_window_J(h);
    lv.tau_max = bound_for(cfg, h, lv.K);
    double tau = cfg.tau_explicit ? *cfg.tau_explicit : cfg.tau_fraction * lv.tau_max;
    if (cfg.n_steps > 0) {
        lv.n_steps = cfg.n_steps;
        lv.tau = tau;
    } else {
        lv.n_steps = std::max(1, static_cast<int>(std::ceil(cfg.t_final / tau - 1e-12)));
        lv.tau = cfg.t_final / lv.n_steps;
    }
    return lv;
}

} // namespace

void ExperimentConfig::validate() const {
    if (!rho) throw ConfigError("config: spatial measure rho is required");
    if (h_list.empty()) throw ConfigError("config: h_list must not be empty");
    for (std::size_t i = 0; i + 1 < h_list.size(); ++i) {
        if (!(h_list[i] > h_list[i + 1])) {
            throw ConfigError("config: h_list must be strictly decreasing");
        }
    }
    for (const double h : h_list) {
        if (!(h > 0.0)) throw ConfigError("config: h values must be > 0");
    }
    if (!(tau_fraction > 0.0) || tau_fraction > 1.0) {
        throw ConfigError("config: tau fraction must be in (0, 1]");
    }
    if (tau_explicit && !(*tau_explicit > 0.0)) {
        throw ConfigError("config: explicit tau must be > 0");
    }
    if (xi_probes.empty()) throw ConfigError("config: xi_probes must not be empty");
    if (!mu && (!(beta > 0.0) || beta > 1.0)) {
        throw ConfigError("config: beta must be in (0, 1]");
    }
    if (mu && std::fabs(mu->total_mass() - 1.0) > 1e-9) {
        throw ConfigError("config: mu must be a probability measure (mass 1) "
                          "for a conservative walk");
    }
    if (variant != SchemeKind::GL && variant != SchemeKind::Liu) {
        throw ConfigError("config: variant must be GL or Liu");
    }
    if (dim_d < 1 || dim_d > 3) throw ConfigError("config: dim_d must be 1, 2 or 3");
    if (n_steps == 0 && !(t_final > 0.0)) throw ConfigError("config: t_final must be > 0");
    if (n_walkers < 0) throw ConfigError("config: n_walkers must be >= 0");
}

int ExperimentConfig::auto_trunc_K(double h) const {
    double k = 0.0;
    switch (dim_d) {
        case 1: k = std::max(64.0, std::ceil(200.0 / h)); break;
        case 2: k = std::max(32.0, std::ceil(20.0 / h)); break;
        default: k = std::max(8.0, std::ceil(8.0 / h)); break;
    }
    return static_cast<int>(std::min(k, 2.0e6));
}

int ExperimentConfig::auto_window_J(double h) const {
    double phys = window_phys;
    if (phys <= 0.0) {
        const double amin = rho ? min_alpha(*rho) : 1.0;
        const double t = n_steps > 0 ? std::max(1.0, t_final) : t_final;
        phys = 160.0 * std::max(1.0, std::pow(std::max(t, 1.0), 1.0 / amin));
        if (dim_d == 2) phys = std::min(phys, 16.0);
        if (dim_d == 3) phys = std::min(phys, 6.0);
    }
    return std::max(1, static_cast<int>(std::ceil(phys / h)));
}

std::string ConvergenceReport::to_json() const {
    nlohmann::json j;
    j["schema"] = schema_version;
    j["mode"] = mode;
    j["errors_monotone"] = errors_monotone;
    j["notes"] = notes;
    auto row_json = [](const LevelRow& r) {
        nlohmann::json o;
        o["h"] = r.h;
        o["tau"] = r.tau;
        o["n_steps"] = r.n_steps;
        o["trunc_K"] = r.trunc_K;
        o["window_J"] = r.window_J;
        o["tau_max"] = r.tau_max;
        o["q0"] = r.q0;
        o["sup_cf_err"] = r.sup_cf_err;
        o["l1_err"] = r.l1_err;
        o["mass_defect"] = r.mass_defect;
        o["boundary_loss"] = r.boundary_loss;
        o["runtime_s"] = r.runtime_s;
        return o;
    };
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) j["rows"].push_back(row_json(r));
    j["mc_rows"] = nlohmann::json::array();
    for (const auto& m : mc_rows) {
        nlohmann::json o;
        o["n_walkers"] = m.n_walkers;
        o["h"] = m.h;
        o["sup_ecf_vs_grid"] = m.sup_ecf_vs_grid;
        o["sup_ecf_vs_exact"] = m.sup_ecf_vs_exact;
        o["envelope"] = m.envelope;
        o["density_sup_err"] = m.density_sup_err;
        o["density_l1_err"] = m.density_l1_err;
        o["runtime_s"] = m.runtime_s;
        j["mc_rows"].push_back(o);
    }
    return j.dump(2);
}

std::string ConvergenceReport::rows_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "# " << schema_version << " mode=" << mode << "\n";
    os << "h,tau,n_steps,trunc_K,window_J,tau_max,q0,sup_cf_err,l1_err,mass_defect,"
          "boundary_loss,runtime_s\n";
    for (const auto& r : rows) {
        os << r.h << "," << r.tau << "," << r.n_steps << "," << r.trunc_K << ","
           << r.window_J << "," << r.tau_max << "," << r.q0 << "," << r.sup_cf_err << ","
           << r.l1_err << "," << r.mass_defect << "," << r.boundary_loss << ","
           << r.runtime_s << "\n";
    }
    return os.str();
}

std::string ConvergenceReport::mc_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "# " << schema_version << " mode=" << mode << " (monte carlo)\n";
    os << "n_walkers,h,sup_ecf_vs_grid,sup_ecf_vs_exact,envelope,density_sup_err,"
          "density_l1_err,runtime_s\n";
    for (const auto& m : mc_rows) {
        os << m.n_walkers << "," << m.h << "," << m.sup_ecf_vs_grid << ","
           << m.sup_ecf_vs_exact << "," << m.envelope << "," << m.density_sup_err << ","
           << m.density_l1_err << "," << m.runtime_s << "\n";
    }
    return os.str();
}

ConvergenceReport run_convergence(const ExperimentConfig& config) {
    config.validate();
    ConvergenceReport report;
    report.mode = "convergence";
    const auto beta_eff = effective_beta(config);
    if (!beta_eff) {
        report.notes = "mixed time measure: no exact transform; "
                       "scheme/MC cross-validation only";
    }

    const GridLayerHistory* last_grid = nullptr;
    GridLayerHistory finest = init_grid(config.dim_d, 1.0, 1.0, 1); // replaced below
    Level finest_level{};
    for (const double h : config.h_list) {
        const double t0 = now_seconds();
        const Level lv = plan_level(config, h);
        if (lv.tau > lv.tau_max * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "run_convergence: tau = " << lv.tau << " exceeds tau_max = " << lv.tau_max
               << " at h = " << h;
            throw StabilityViolation(os.str());
        }
        const auto table = make_table(config, lv.n_steps, lv.tau);
        const auto kernel = build_kernel(*config.rho, config.dim_d, h, table, lv.K);
        auto grid = init_grid(config.dim_d, h, lv.tau, lv.J);
        run(grid, table, kernel, lv.n_steps);

        LevelRow row;
        row.h = h;
        row.tau = lv.tau;
        row.n_steps = lv.n_steps;
        row.trunc_K = lv.K;
        row.window_J = lv.J;
        row.tau_max = lv.tau_max;
        row.q0 = kernel.q0();
        const double t_end = lv.n_steps * lv.tau;
        double sup = 0.0;
        if (beta_eff) {
            for (const double xi : config.xi_probes) {
                const double approx = grid_cf(grid, lv.n_steps, xi).real();
                const double exact = exact_cf(*config.rho, *beta_eff, t_end, xi);
                sup = std::max(sup, std::fabs(approx - exact));
            }
        } else {
            sup = std::numeric_limits<double>::quiet_NaN();
        }
        row.sup_cf_err = sup;
        row.mass_defect = grid.max_conservation_defect();
        row.boundary_loss = grid.boundary_mass_lost();
        row.runtime_s = now_seconds() - t0;
        report.rows.push_back(row);

        finest = std::move(grid);
        finest_level = lv;
        last_grid = &finest;
    }

    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
        if (!(report.rows[i + 1].sup_cf_err < report.rows[i].sup_cf_err) &&
            !std::isnan(report.rows[i].sup_cf_err)) {
            report.errors_monotone = false;
        }
    }

    if (config.n_walkers > 0 && last_grid) {
        const double t0 = now_seconds();
        const auto table = make_table(config, finest_level.n_steps, finest_level.tau);
        const auto kernel =
            build_kernel(*config.rho, config.dim_d, finest_level.h, table, finest_level.K);
        NonMarkovSampler sampler(table, kernel);
        const auto ensemble =
            sampler.sample_ensemble(config.n_walkers, finest_level.n_steps,
                                    config.master_seed);
        McRow mc;
        mc.n_walkers = config.n_walkers;
        mc.h = finest_level.h;
        mc.envelope = 4.0 / std::sqrt(static_cast<double>(config.n_walkers));
        double vs_grid = 0.0;
        double vs_exact = beta_eff ? 0.0 : std::numeric_limits<double>::quiet_NaN();
        const double t_end = finest_level.n_steps * finest_level.tau;
        for (const double xi : config.xi_probes) {
            const double ecf = empirical_cf(ensemble, finest_level.h, xi).real();
            vs_grid = std::max(vs_grid,
                               std::fabs(ecf - grid_cf(finest, finest_level.n_steps, xi).real()));
            if (beta_eff) {
                vs_exact = std::max(vs_exact,
                                    std::fabs(ecf - exact_cf(*config.rho, *beta_eff, t_end, xi)));
            }
        }
        mc.sup_ecf_vs_grid = vs_grid;
        mc.sup_ecf_vs_exact = vs_exact;
        mc.runtime_s = now_seconds() - t0;
        report.mc_rows.push_back(mc);
    }
    return report;
}

ConvergenceReport run_theorem2(const ExperimentConfig& config) {
    config.validate();
    if (config.mu || config.beta != 1.0) {
        throw ConfigError("run_theorem2: requires beta = 1");
    }
    ConvergenceReport report;
    report.mode = "theorem2";

    auto reference_on = [&](double h, int J,
                            std::vector<double>& x_out) -> std::vector<double> {
        // reference on a grid fine enough for the Nyquist decay check,
        // subsampled back onto the scheme's sites
        int refine = 1;
        double dx = h;
        const double t = config.t_final;
        while (std::exp(t * symbol_psi(*config.rho, 3.14159265358979323846 / dx)) >= 1e-12 &&
               refine < 64) {
            refine *= 2;
            dx = h / refine;
        }
        const int half = J * refine;
        std::vector<double> xg(static_cast<std::size_t>(2 * half) + 1);
        for (int i = -half; i <= half; ++i) xg[static_cast<std::size_t>(i + half)] = i * dx;
        FftConfig fcfg;
        fcfg.min_modes = 1 << 15;
        const auto dens = green_function_beta1(*config.rho, t, xg, fcfg);
        std::vector<double> at_sites(static_cast<std::size_t>(2 * J) + 1);
        x_out.resize(at_sites.size());
        for (int j = -J; j <= J; ++j) {
            at_sites[static_cast<std::size_t>(j + J)] =
                dens[static_cast<std::size_t>(j * refine + half)];
            x_out[static_cast<std::size_t>(j + J)] = j * h;
        }
        return at_sites;
    };

    GridLayerHistory finest = init_grid(1, 1.0, 1.0, 1);
    Level finest_level{};
    std::vector<double> finest_ref, finest_x;
    for (const double h : config.h_list) {
        const double t0 = now_seconds();
        const Level lv = plan_level(config, h);
        const double Q = detail::lattice_q_total(*config.rho, config.dim_d, h, lv.K);
        const double sigma = 2.0 * lv.tau * Q;
        if (sigma > 1.0) {
            std::ostringstream os;
            os << "run_theorem2: sigma(tau, h) = " << sigma
               << " > 1; lower the tau fraction";
            throw StabilityViolation(os.str());
        }
        const auto table = make_table(config, lv.n_steps, lv.tau);
        const auto kernel = build_kernel(*config.rho, config.dim_d, h, table, lv.K);
        auto grid = init_grid(config.dim_d, h, lv.tau, lv.J);
        run(grid, table, kernel, lv.n_steps);

        std::vector<double> xs;
        const auto ref = reference_on(h, lv.J, xs);
        double sup = 0.0, l1 = 0.0;
        const auto layer = grid.layer(lv.n_steps);
        for (int j = -lv.J; j <= lv.J; ++j) {
            if (std::fabs(j * h) > config.x_window) continue;
            const double approx = layer[static_cast<std::size_t>(j + lv.J)] / h;
            const double err = std::fabs(approx - ref[static_cast<std::size_t>(j + lv.J)]);
            sup = std::max(sup, err);
            l1 += err * h;
        }

        LevelRow row;
        row.h = h;
        row.tau = lv.tau;
        row.n_steps = lv.n_steps;
        row.trunc_K = lv.K;
        row.window_J = lv.J;
        row.tau_max = lv.tau_max;
        row.q0 = kernel.q0();
        row.sup_cf_err = sup;
        row.l1_err = l1;
        row.mass_defect = grid.max_conservation_defect();
        row.boundary_loss = grid.boundary_mass_lost();
        row.runtime_s = now_seconds() - t0;
        report.rows.push_back(row);

        finest = std::move(grid);
        finest_level = lv;
        finest_ref = ref;
        finest_x = xs;
    }

    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
        if (!(report.rows[i + 1].sup_cf_err < report.rows[i].sup_cf_err)) {
            report.errors_monotone = false;
        }
    }

    if (config.n_walkers > 0) {
        const double t0 = now_seconds();
        const auto table = make_table(config, finest_level.n_steps, finest_level.tau);
        const auto kernel =
            build_kernel(*config.rho, config.dim_d, finest_level.h, table, finest_level.K);
        NonMarkovSampler sampler(table, kernel);
        const auto ensemble = sampler.sample_ensemble(
            config.n_walkers, finest_level.n_steps, config.master_seed);
        const auto hist = final_position_histogram(ensemble, finest_level.J);
        McRow mc;
        mc.n_walkers = config.n_walkers;
        mc.h = finest_level.h;
        mc.envelope = 4.0 / std::sqrt(static_cast<double>(config.n_walkers));
        double sup = 0.0, l1 = 0.0;
        const double cell = static_cast<double>(config.n_walkers) * finest_level.h;
        for (int j = -finest_level.J; j <= finest_level.J; ++j) {
            if (std::fabs(j * finest_level.h) > config.x_window) continue;
            const double approx = hist.counts[static_cast<std::size_t>(j + finest_level.J)] / cell;
            const double err =
                std::fabs(approx - finest_ref[static_cast<std::size_t>(j + finest_level.J)]);
            sup = std::max(sup, err);
            l1 += err * finest_level.h;
        }
        mc.density_sup_err = sup;
        mc.density_l1_err = l1;
        double vs_grid = 0.0;
        for (const double xi : config.xi_probes) {
            vs_grid = std::max(
                vs_grid, std::fabs(empirical_cf(ensemble, finest_level.h, xi).real() -
                                   grid_cf(finest, finest_level.n_steps, xi).real()));
        }
        mc.sup_ecf_vs_grid = vs_grid;
        mc.sup_ecf_vs_exact = std::numeric_limits<double>::quiet_NaN();
        mc.runtime_s = now_seconds() - t0;
        report.mc_rows.push_back(mc);
    }
    return report;
}

ConvergenceReport run_distributed_order(const ExperimentConfig& config) {
    config.validate();
    if (!config.mu) throw ConfigError("run_distributed_order: requires a time measure mu");
    auto report = run_convergence(config);
    report.mode = "distorder";
    return report;
}

} // namespace ctrw
