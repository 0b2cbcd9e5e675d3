// ctrwdiff: experiment driver for lattice random-walk approximations of
// distributed-order fractional diffusion. Subcommands wire measures,
// coefficient tables, jump kernels, the explicit scheme, the Monte Carlo
// sampler and the spectral reference into reproducible studies.
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctrw/ctrw_sampler.hpp"
#include "ctrw/errors.hpp"
#include "ctrw/experiment.hpp"
#include "ctrw/master_scheme.hpp"
#include "ctrw/measures.hpp"
#include "ctrw/space_kernel.hpp"
#include "ctrw/spectral_reference.hpp"
#include "ctrw/time_discretization.hpp"

namespace {

using ctrw::SchemeKind;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ctrw::ConfigError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ctrw::ConfigError("cannot write file: " + path);
    out << content;
    std::cout << path << "\n";
}

std::string default_output_dir() {
    if (const char* env = std::getenv("CTRWDIFF_OUTPUT_DIR")) return env;
    return ".";
}

struct MeasureArgs {
    std::string rho_file;
    double alpha = 0.0; // single-atom shortcut
    std::string mu_file;
    double beta = 0.0;

    ctrw::SpectralMeasure rho() const {
        if (!rho_file.empty()) return ctrw::SpectralMeasure::from_json(read_file(rho_file));
        if (alpha > 0.0) return ctrw::make_atomic_measure({{alpha, 1.0}});
        throw ctrw::ConfigError("spatial measure required: --rho FILE or --alpha A");
    }
    std::optional<ctrw::TimeMeasure> mu() const {
        if (mu_file.empty()) return std::nullopt;
        return ctrw::TimeMeasure::from_json(read_file(mu_file));
    }
};

SchemeKind parse_variant(const std::string& v) {
    if (v == "GL" || v == "gl") return SchemeKind::GL;
    if (v == "Liu" || v == "liu") return SchemeKind::Liu;
    throw ctrw::ConfigError("variant must be GL or Liu");
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

ctrw::CoefficientTable table_for(const MeasureArgs& m, SchemeKind variant, int n,
                                 double tau) {
    if (auto mu = m.mu()) return ctrw::distributed_coefficients(*mu, variant, n, tau);
    if (variant == SchemeKind::Liu) return ctrw::liu_coefficients(m.beta, n, tau);
    return ctrw::gl_coefficients(m.beta, n, tau);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"ctrwdiff: CTRW approximations of fractional space-time diffusion"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help"); // keep --h free for the spacing flag

    std::string out_dir = default_output_dir();

    MeasureArgs meas;
    meas.beta = 0.5;
    std::string variant_name = "GL";
    int dim_d = 1;
    double h = 0.1;
    double tau = 0.0; // 0: auto
    double tau_frac = 0.9;
    int steps = 100;
    int trunc_K = 0;
    double window_phys = 0.0;
    int n_walkers = 100000;
    std::uint64_t seed = 12345;
    double t_final = 1.0;
    std::vector<double> h_list;
    std::vector<double> xi_probes;
    double x_window = 10.0;
    std::string config_file;

    auto add_measure_flags = [&](CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("--out", out_dir, "output directory (env CTRWDIFF_OUTPUT_DIR)");
        cmd->add_option("--rho", meas.rho_file, "spatial measure JSON file");
        cmd->add_option("--alpha", meas.alpha, "single stable order (atomic rho shortcut)");
        cmd->add_option("--mu", meas.mu_file, "time measure JSON file (distributed order)");
        cmd->add_option("--beta", meas.beta, "fractional time order");
        cmd->add_option("--variant", variant_name, "time discretization variant: GL | Liu");
    };

    // ---- coeffs ----
    auto* c_coeffs = app.add_subcommand("coeffs", "emit coefficient table (CSV + JSON)");
    add_measure_flags(c_coeffs);
    c_coeffs->add_option("--n", steps, "table horizon");
    c_coeffs->add_option("--tau", tau, "time step");
    c_coeffs->callback([&] {
        const double tt = tau > 0.0 ? tau : 0.01;
        const auto table = table_for(meas, parse_variant(variant_name), steps, tt);
        write_file(out_path(out_dir, "coeffs.csv"), table.to_csv());
        write_file(out_path(out_dir, "coeffs.json"), table.to_json());
    });

    // ---- kernel ----
    auto* c_kernel = app.add_subcommand("kernel", "emit lattice jump weights (CSV)");
    add_measure_flags(c_kernel);
    c_kernel->add_option("--d", dim_d, "spatial dimension");
    c_kernel->add_option("--h", h, "lattice spacing");
    c_kernel->add_option("--tau", tau, "time step (0: 0.9 * tau_max)");
    c_kernel->add_option("--K", trunc_K, "lattice truncation radius (0: auto)");
    c_kernel->callback([&] {
        const auto rho = meas.rho();
        const int K = trunc_K > 0 ? trunc_K : (dim_d == 1 ? 256 : 32);
        const auto mu = meas.mu();
        const double bound_gl =
            mu ? ctrw::distributed_stability_bound(rho, dim_d, h, K, *mu, SchemeKind::GL)
               : ctrw::stability_bound(rho, dim_d, h, K, meas.beta, SchemeKind::GL);
        const double tt = tau > 0.0 ? tau : 0.9 * bound_gl;
        const auto table = table_for(meas, parse_variant(variant_name), 1, tt);
        const auto kernel = ctrw::build_kernel(rho, dim_d, h, table, K);
        std::ostringstream os;
        os.precision(17);
        os << "k,q_k\n";
        if (dim_d == 1) {
            for (int k = -K; k <= K; ++k) os << k << "," << kernel.q_at(k) << "\n";
        } else {
            for (int ky = -K; ky <= K; ++ky)
                for (int kx = -K; kx <= K; ++kx) {
                    const double q = dim_d == 2 ? kernel.q_at(kx, ky) : kernel.q_at(kx, ky, 0);
                    if (q != 0.0) os << kx << ";" << ky << "," << q << "\n";
                }
        }
        write_file(out_path(out_dir, "kernel.csv"), os.str());
        std::cout << "q0 = " << kernel.q0() << ", Q(h) = " << kernel.q_total()
                  << ", tail estimate = " << kernel.tail_estimate() << "\n";
        std::cout << "tau_max(GL) = " << bound_gl;
        if (!mu && meas.beta < 1.0) {
            std::cout << ", tau_max(Liu) = "
                      << ctrw::stability_bound(rho, dim_d, h, K, meas.beta, SchemeKind::Liu);
        }
        std::cout << "\n";
    });

    // ---- solve ----
    auto* c_solve = app.add_subcommand("solve", "run the explicit scheme; final layer CSV");
    add_measure_flags(c_solve);
    c_solve->add_option("--d", dim_d, "spatial dimension");
    c_solve->add_option("--h", h, "lattice spacing");
    c_solve->add_option("--tau", tau, "time step (0: fraction of the bound)");
    c_solve->add_option("--tau-frac", tau_frac, "fraction of tau_max when tau is auto");
    c_solve->add_option("--steps", steps, "number of time steps");
    c_solve->add_option("--K", trunc_K, "lattice truncation radius (0: auto)");
    c_solve->add_option("--window", window_phys, "half-width of the window in x units");
    c_solve->callback([&] {
        const auto rho = meas.rho();
        ctrw::ExperimentConfig cfg;
        cfg.rho = rho;
        cfg.mu = meas.mu();
        cfg.beta = meas.beta;
        cfg.variant = parse_variant(variant_name);
        cfg.dim_d = dim_d;
        cfg.window_phys = window_phys;
        const int K = trunc_K > 0 ? trunc_K : cfg.auto_trunc_K(h);
        const auto mu = meas.mu();
        const double bound =
            mu ? ctrw::distributed_stability_bound(rho, dim_d, h, K, *mu,
                                                   parse_variant(variant_name))
               : ctrw::stability_bound(rho, dim_d, h, K, meas.beta,
                                       parse_variant(variant_name));
        const double tt = tau > 0.0 ? tau : tau_frac * bound;
        const auto table = table_for(meas, parse_variant(variant_name), steps, tt);
        const auto kernel = ctrw::build_kernel(rho, dim_d, h, table, K);
        auto grid = ctrw::init_grid(dim_d, h, tt, cfg.auto_window_J(h));
        ctrw::run(grid, table, kernel, steps);

        std::ostringstream os;
        os.precision(17);
        os << "j,x_j,u_j\n";
        const int J = grid.window_J();
        if (dim_d == 1) {
            for (int j = -J; j <= J; ++j) {
                os << j << "," << j * h << "," << grid.value_at(steps, j) << "\n";
            }
        } else {
            for (int j = -J; j <= J; ++j) {
                os << j << "," << j * h << "," << grid.value_at(steps, j, 0, 0) << "\n";
            }
        }
        write_file(out_path(out_dir, "solve_layer.csv"), os.str());

        nlohmann::json rep;
        rep["h"] = h;
        rep["tau"] = tt;
        rep["tau_max"] = bound;
        rep["steps"] = steps;
        rep["trunc_K"] = K;
        rep["window_J"] = J;
        rep["q0"] = kernel.q0();
        rep["mass_defect"] = grid.max_conservation_defect();
        rep["boundary_loss"] = grid.boundary_mass_lost();
        write_file(out_path(out_dir, "solve_report.json"), rep.dump(2));
    });

    // ---- sample ----
    auto* c_sample = app.add_subcommand("sample", "Monte Carlo ensemble; histogram CSV");
    add_measure_flags(c_sample);
    c_sample->add_option("--d", dim_d, "spatial dimension");
    c_sample->add_option("--h", h, "lattice spacing");
    c_sample->add_option("--tau", tau, "time step (0: fraction of the bound)");
    c_sample->add_option("--tau-frac", tau_frac, "fraction of tau_max when tau is auto");
    c_sample->add_option("--steps", steps, "number of time steps");
    c_sample->add_option("--N", n_walkers, "number of walkers");
    c_sample->add_option("--seed", seed, "master seed");
    c_sample->add_option("--K", trunc_K, "lattice truncation radius (0: auto)");
    c_sample->callback([&] {
        const auto rho = meas.rho();
        const int K = trunc_K > 0 ? trunc_K : 256;
        const auto mu = meas.mu();
        const double bound =
            mu ? ctrw::distributed_stability_bound(rho, dim_d, h, K, *mu,
                                                   parse_variant(variant_name))
               : ctrw::stability_bound(rho, dim_d, h, K, meas.beta,
                                       parse_variant(variant_name));
        const double tt = tau > 0.0 ? tau : tau_frac * bound;
        const auto table = table_for(meas, parse_variant(variant_name), steps, tt);
        const auto kernel = ctrw::build_kernel(rho, dim_d, h, table, K);
        ctrw::NonMarkovSampler sampler(table, kernel);
        const double t0 = static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
        const auto ensemble = sampler.sample_ensemble(n_walkers, steps, seed);
        const double dt = static_cast<double>(std::clock()) / CLOCKS_PER_SEC - t0;

        const long reach = static_cast<long>(steps) * K;
        const int JJ = static_cast<int>(std::min<long>(reach, 100000));
        const auto hist = ctrw::final_position_histogram(ensemble, JJ);
        std::ostringstream os;
        os << "j,count\n";
        for (int j = -JJ; j <= JJ; ++j) {
            const double c = hist.counts[static_cast<std::size_t>(j + JJ)];
            if (c != 0.0) os << j << "," << c << "\n";
        }
        write_file(out_path(out_dir, "sample_hist.csv"), os.str());

        nlohmann::json rep;
        rep["seed"] = seed;
        rep["n_walkers"] = n_walkers;
        rep["steps"] = steps;
        rep["tau"] = tt;
        rep["h"] = h;
        rep["branch_counts"] = {{"origin", ensemble.branch_counts()[0]},
                                {"memory", ensemble.branch_counts()[1]},
                                {"jump", ensemble.branch_counts()[2]}};
        rep["overflow"] = hist.overflow;
        rep["runtime_s"] = dt;
        write_file(out_path(out_dir, "sample_summary.json"), rep.dump(2));
    });

    // ---- reference ----
    auto* c_ref = app.add_subcommand("reference", "exact CF and density CSVs");
    add_measure_flags(c_ref);
    c_ref->add_option("--t", t_final, "time");
    c_ref->add_option("--h", h, "density grid spacing");
    c_ref->add_option("--window", x_window, "density half-width");
    c_ref->callback([&] {
        const auto rho = meas.rho();
        std::ostringstream cf;
        cf.precision(17);
        cf << "xi,cf\n";
        for (int i = 0; i <= 400; ++i) {
            const double xi = i * 0.05;
            cf << xi << "," << ctrw::exact_cf(rho, meas.beta, t_final, xi) << "\n";
        }
        write_file(out_path(out_dir, "reference_cf.csv"), cf.str());

        const int half = static_cast<int>(std::ceil(x_window / h));
        std::vector<double> xg(static_cast<std::size_t>(2 * half) + 1);
        for (int i = -half; i <= half; ++i) xg[static_cast<std::size_t>(i + half)] = i * h;
        std::vector<double> dens;
        if (meas.beta == 1.0) {
            dens = ctrw::green_function_beta1(rho, t_final, xg);
        } else {
            ctrw::FftConfig fc;
            fc.min_modes = 1 << 15;
            // algebraic CF tails: the inversion is truncated at pi/h; the
            // residual shows up as ringing, not lost mass
            fc.max_cf_at_cutoff = 0.05;
            dens = ctrw::frac_density(rho, meas.beta, t_final, xg, fc);
        }
        std::ostringstream ds;
        ds.precision(17);
        ds << "x,density\n";
        for (std::size_t i = 0; i < xg.size(); ++i) ds << xg[i] << "," << dens[i] << "\n";
        write_file(out_path(out_dir, "reference_density.csv"), ds.str());
    });

    // ---- converge / theorem2 / distorder ----
    auto add_study_flags = [&](CLI::App* cmd) {
        add_measure_flags(cmd);
        cmd->add_option("--config", config_file, "JSON config file (flags win)");
        cmd->add_option("--d", dim_d, "spatial dimension");
        cmd->add_option("--h-list", h_list, "decreasing lattice spacings");
        cmd->add_option("--xi", xi_probes, "CF probe frequencies");
        cmd->add_option("--t", t_final, "final time");
        cmd->add_option("--tau-frac", tau_frac, "fraction of tau_max");
        cmd->add_option("--N", n_walkers, "walkers for MC rows (0: none)");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--K", trunc_K, "lattice truncation radius (0: auto)");
        cmd->add_option("--window", window_phys, "window half-width in x units (0: auto)");
        cmd->add_option("--x-window", x_window, "density comparison half-width");
    };

    auto build_config = [&]() {
        ctrw::ExperimentConfig cfg;
        if (!config_file.empty()) {
            const auto j = nlohmann::json::parse(read_file(config_file));
            if (j.contains("rho")) cfg.rho = ctrw::SpectralMeasure::from_json(j["rho"].dump());
            if (j.contains("mu")) cfg.mu = ctrw::TimeMeasure::from_json(j["mu"].dump());
            cfg.beta = j.value("beta", cfg.beta);
            if (j.contains("variant")) cfg.variant = parse_variant(j["variant"].get<std::string>());
            cfg.dim_d = j.value("dim_d", cfg.dim_d);
            if (j.contains("h_list")) cfg.h_list = j["h_list"].get<std::vector<double>>();
            cfg.tau_fraction = j.value("tau_fraction", cfg.tau_fraction);
            cfg.t_final = j.value("t_final", cfg.t_final);
            if (j.contains("xi_probes")) cfg.xi_probes = j["xi_probes"].get<std::vector<double>>();
            cfg.x_window = j.value("x_window", cfg.x_window);
            cfg.n_walkers = j.value("n_walkers", cfg.n_walkers);
            cfg.master_seed = j.value("master_seed", cfg.master_seed);
            cfg.trunc_K = j.value("trunc_K", cfg.trunc_K);
            cfg.window_phys = j.value("window_phys", cfg.window_phys);
        }
        // flags override the file
        if (!meas.rho_file.empty() || meas.alpha > 0.0) cfg.rho = meas.rho();
        if (auto mu = meas.mu()) cfg.mu = mu;
        cfg.beta = meas.beta;
        cfg.variant = parse_variant(variant_name);
        cfg.dim_d = dim_d;
        if (!h_list.empty()) cfg.h_list = h_list;
        if (!xi_probes.empty()) cfg.xi_probes = xi_probes;
        cfg.t_final = t_final;
        cfg.tau_fraction = tau_frac;
        cfg.n_walkers = n_walkers;
        cfg.master_seed = seed;
        cfg.trunc_K = trunc_K;
        cfg.window_phys = window_phys;
        cfg.x_window = x_window;
        cfg.output_dir = out_dir;
        return cfg;
    };

    auto emit_report = [&](const ctrw::ConvergenceReport& rep, const std::string& stem) {
        write_file(out_path(out_dir, stem + "_report.json"), rep.to_json());
        write_file(out_path(out_dir, stem + "_levels.csv"), rep.rows_csv());
        if (!rep.mc_rows.empty()) {
            write_file(out_path(out_dir, stem + "_mc.csv"), rep.mc_csv());
        }
        std::cout << "errors_monotone = " << (rep.errors_monotone ? "yes" : "no") << "\n";
    };

    auto* c_conv = app.add_subcommand("converge", "CF convergence study over h");
    add_study_flags(c_conv);
    c_conv->callback([&] { emit_report(run_convergence(build_config()), "converge"); });

    auto* c_th2 = app.add_subcommand("theorem2", "beta = 1 density study vs Green function");
    add_study_flags(c_th2);
    c_th2->callback([&] {
        auto cfg = build_config();
        cfg.beta = 1.0;
        if (cfg.tau_fraction > 0.5) cfg.tau_fraction = 0.45;
        emit_report(run_theorem2(cfg), "theorem2");
    });

    auto* c_dist = app.add_subcommand("distorder", "distributed-order study (needs --mu)");
    add_study_flags(c_dist);
    c_dist->callback([&] { emit_report(run_distributed_order(build_config()), "distorder"); });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ctrw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ctrw::StabilityViolation& e) {
        std::cerr << "stability violation: " << e.what() << "\n";
        return 3;
    } catch (const ctrw::AliasingError& e) {
        std::cerr << "numeric guard: " << e.what() << "\n";
        return 4;
    } catch (const ctrw::TailError& e) {
        std::cerr << "numeric guard: " << e.what() << "\n";
        return 4;
    } catch (const ctrw::TruncationTooCoarse& e) {
        std::cerr << "numeric guard: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
