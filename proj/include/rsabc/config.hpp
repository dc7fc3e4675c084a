#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rsabc/kernels.hpp"
#include "rsabc/models.hpp"
#include "rsabc/smc.hpp"

namespace rsabc {

enum class SigmaMode { identity, fixed, pilot_prior, pilot_at_init };

SigmaMode sigma_mode_from_string(const std::string& s);
std::string to_string(SigmaMode m);

struct SigmaConfig {
    SigmaMode mode = SigmaMode::identity;
    std::vector<double> values;  // diagonal, fixed mode only
    size_t n_pilot = 100;
};

struct ProposalConfig {
    std::vector<double> sd;  // per-coordinate; single entry broadcasts
    bool adapt = true;
    size_t refresh = 500;
};

// One sampler invocation. Multi-stage configs chain a warm-up "r" stage into
// "rs"/"xrs" refinement stages that inherit (theta, sigma, delta, proposal
// covariance) from the previous stage's end state.
struct StageConfig {
    std::string sampler;  // pm | r | rs | xrs | smc | exchange | exact
    size_t n_iter = 0;

    size_t m = 500;            // pm: simulations per proposal
    size_t r = 500;            // r: resamples
    size_t r1 = 500, r2 = 500; // rs/xrs: train/test resamples

    // Threshold. 0 means: self-tune (r), or inherit from the previous stage
    // (rs/xrs in stage >= 2). Fixed-threshold samplers default to 3e-4.
    double delta = 0.0;
    bool delta_given = false;
    double psi = 5.0;          // r: percentile level for tuning, percent units
    size_t k_burnin = 0;       // r: sigma refresh point (0 = never)
    size_t check_period = 0;   // r: 0 = every 5% of the run
    bool tune_delta = true;    // r: false freezes the threshold

    std::vector<double> breaks;  // rs/xrs: absolute distance breakpoints
    bool breaks_given = false;   // absent => (delta/2, delta) at run time

    SmcSettings smc;

    double exchange_sd = 0.05;

    ProposalConfig proposal;
    bool proposal_given = false;  // stage override vs. shared default
    bool inherit = true;          // stage >= 2: adopt previous end state
};

struct ExperimentConfig {
    std::string name;   // artifact label, defaults to the config file stem
    std::string model;  // gaussian | gk | ising | lv
    uint64_t seed = 1;
    std::string output_dir;     // defaults to "<name>_out"
    std::string observed_path;  // resolved against config_dir; empty => simulate
    ParameterVector theta_true; // sampling scale, for simulated observations
    ParameterVector init;       // sampling scale; empty => prior draw
    size_t discard = 0;         // leading rows dropped from diagnostics only
    KernelKind kernel = KernelKind::gaussian;
    SigmaConfig sigma;
    ProposalConfig proposal;  // shared default for stages without an override

    // Model knobs; only those matching `model` may be set.
    size_t n_obs = 0;  // 0 = model default (gaussian 1000, gk 2000)
    double prior_mean = 0.1, prior_sd = 0.2;  // gaussian
    double gk_c = 0.8;
    int side = 100, sweeps = 50, tile = 20;   // ising
    double ising_prior_lo = 0.0, ising_prior_hi = 3.0;
    LvSettings lv;

    std::vector<StageConfig> stages;  // at least one

    std::string config_dir;   // for resolving relative data paths
    std::string source_text;  // raw JSON, echoed into the artifacts
};

// Strict parse: unknown keys anywhere are errors, every knob is checked
// against the chosen model and samplers, and all validation failures are
// reported together in one config error.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_string(const std::string& json_text,
                                     const std::string& base_dir,
                                     const std::string& name = "run");

// Instantiates the configured model (throws config errors on bad knobs).
std::unique_ptr<Model> build_model(const ExperimentConfig& cfg);

}  // namespace rsabc
