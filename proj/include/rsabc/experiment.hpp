#pragma once

#include <string>
#include <vector>

#include "rsabc/chain.hpp"
#include "rsabc/config.hpp"
#include "rsabc/diagnostics.hpp"
#include "rsabc/smc.hpp"

namespace rsabc {

// Everything a finished run leaves on disk. Numeric simulation content
// (chains, particles, traces, sweep tables, densities) is byte-identical
// across repeat runs with the same config and seed; wall-clock fields in the
// diagnostics are the only nondeterministic values.
struct RunArtifacts {
    std::string output_dir;
    std::string chain_path;        // final-stage chain (MCMC samplers)
    std::string particles_path;    // final population (smc)
    std::string sweep_path;        // sweep mode
    std::string diagnostics_path;
    std::string config_echo_path;
    std::string threshold_path;
    std::string manifest_path;
    std::vector<std::string> density_paths;
    std::vector<std::string> stage_chain_paths;
};

// Resolves the output directory: $RSABC_OUT_ROOT prefixes relative paths.
std::string resolve_output_dir(const ExperimentConfig& cfg);

// Runs the configured stage pipeline and writes all artifacts.
RunArtifacts run_experiment(const ExperimentConfig& cfg);

// Kernel density grids for each parameter (natural scale), written next to
// the chain they came from; the grid integrates to 1 within 1e-6.
std::vector<std::string> emit_plot_data(const Chain& chain, size_t discard,
                                        const Model& model,
                                        const std::string& output_dir);

// ---- Likelihood-curve sweep over a 1-parameter grid

struct SweepSettings {
    double lo = -0.1, hi = 0.1;
    size_t n_points = 50;
    size_t n_reps = 1000;
    size_t max_attempts = 10000;  // conditioned redraw cap, stratified only
};

struct SweepPoint {
    double theta = 0.0;
    double mean_log = 0.0;   // mean of the log estimates
    double lo_log = 0.0;     // 2.5% of the log estimates
    double hi_log = 0.0;     // 97.5%
    double mean_attempts = 1.0;  // simulations-per-estimate (stratified > 1)
};

// Repeated likelihood estimation at each grid value with the estimator named
// by `stage` (pm | r | rs | xrs). Stratified estimators redraw until every
// stratum is occupied, matching how the likelihood curves are displayed.
std::vector<SweepPoint> likelihood_sweep(const Model& model,
                                         const SummaryVector& s_obs,
                                         const ScalingMatrix& sigma,
                                         KernelKind kernel,
                                         const StageConfig& stage,
                                         const SweepSettings& settings,
                                         RandomStream& rng);

// Sweep entry point for the CLI: resolves data/sigma from the config, runs
// the sweep for the first stage's sampler, writes sweep.txt and a manifest.
RunArtifacts run_sweep(const ExperimentConfig& cfg,
                       const SweepSettings& settings);

// Reads a chain file back (columns: iter, theta..., log_lik, accepted,
// delta) for the standalone diagnostics mode.
Chain load_chain_file(const std::string& path);

}  // namespace rsabc
