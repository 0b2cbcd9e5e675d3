#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctrw/ctrw_sampler.hpp"
#include "ctrw/master_scheme.hpp"
#include "ctrw/measures.hpp"
#include "ctrw/space_kernel.hpp"
#include "ctrw/spectral_reference.hpp"
#include "ctrw/time_discretization.hpp"

namespace ctrw {

/// Declarative description of a convergence study. h_list drives the
/// refinement; tau follows tau_fraction * tau_max(h) unless tau_explicit is
/// set, and is then snapped to t_final / n so every level lands exactly on
/// t_final.
struct ExperimentConfig {
    std::optional<SpectralMeasure> rho;
    std::optional<TimeMeasure> mu;       // distributed-order runs
    double beta = 1.0;                   // ignored when mu is set
    SchemeKind variant = SchemeKind::GL; // GL or Liu
    int dim_d = 1;

    std::vector<double> h_list;
    double tau_fraction = 0.9;
    std::optional<double> tau_explicit;
    double t_final = 1.0;
    int n_steps = 0; // 0: derive from t_final

    std::vector<double> xi_probes;
    double x_window = 10.0; // density comparison half-width (theorem2)

    int n_walkers = 0; // 0: no Monte Carlo rows
    std::uint64_t master_seed = 12345;

    int trunc_K = 0;        // 0: auto from h and dim
    double window_phys = 0; // 0: auto; else window_J = ceil(window_phys / h)

    std::string output_dir = ".";

    void validate() const;
    int auto_trunc_K(double h) const;
    int auto_window_J(double h) const;
};

struct LevelRow {
    double h = 0.0;
    double tau = 0.0;
    int n_steps = 0;
    int trunc_K = 0;
    int window_J = 0;
    double tau_max = 0.0;
    double q0 = 0.0;
    double sup_cf_err = 0.0; // sup over probes; density sup-error in theorem2 mode
    double l1_err = 0.0;     // density L1 error where a density oracle exists
    double mass_defect = 0.0;
    double boundary_loss = 0.0;
    double runtime_s = 0.0;
};

struct McRow {
    int n_walkers = 0;
    double h = 0.0;
    double sup_ecf_vs_grid = 0.0;
    double sup_ecf_vs_exact = 0.0; // NaN when no oracle exists
    double envelope = 0.0;         // 4 / sqrt(N)
    double density_sup_err = 0.0;  // theorem2 mode
    double density_l1_err = 0.0;
    double runtime_s = 0.0;
};

/// Machine-readable study result. Numeric columns are reproducible from
/// (config, master_seed); runtime columns are informational.
struct ConvergenceReport {
    static constexpr const char* schema_version = "ctrw-report/1";
    std::string mode; // convergence | theorem2 | distorder
    std::vector<LevelRow> rows;
    std::vector<McRow> mc_rows;
    bool errors_monotone = true;
    std::string notes;

    std::string to_json() const;
    std::string rows_csv() const;
    std::string mc_csv() const;
};

/// Scheme-vs-exact characteristic function study over the h refinement;
/// flags non-monotone error columns in the report instead of failing.
ConvergenceReport run_convergence(const ExperimentConfig& config);

/// beta = 1 random-walk study against the closed-form Green's function;
/// enforces sigma(tau, h) = 2 tau Q(h) <= 1.
ConvergenceReport run_theorem2(const ExperimentConfig& config);

/// Distributed-order pipeline. With a single-atom mu this reduces exactly
/// to run_convergence at that order; for genuine mixtures no exact
/// transform is available and the report carries scheme-vs-MC
/// cross-validation only.
ConvergenceReport run_distributed_order(const ExperimentConfig& config);

} // namespace ctrw
