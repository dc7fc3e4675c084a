#pragma once

#include <functional>
#include <limits>

#include "rsabc/chain.hpp"
#include "rsabc/models.hpp"
#include "rsabc/stratification.hpp"

namespace rsabc {

// Weighted particle cloud. Log weights are stored unnormalized (shifts common
// to all particles are dropped); normalized_weights() recovers the simplex
// vector.
struct ParticlePopulation {
    std::vector<ParameterVector> particles;  // sampling scale
    std::vector<SummaryVector> summaries;
    std::vector<double> distances;  // scaled distances from s_obs
    std::vector<double> log_weights;
    double delta = std::numeric_limits<double>::infinity();
    size_t iteration = 0;
    double last_move_acceptance = 1.0;

    size_t size() const { return particles.size(); }
    std::vector<double> normalized_weights() const;
};

// Effective sample size (sum of squared normalized weights, inverted).
double ess(const std::vector<double>& weights);
double ess_from_log(const std::vector<double>& log_weights);

struct ReweightResult {
    double delta = 0.0;
    std::vector<double> log_weights;
    bool root_found = false;
};

// Solves ESS(w(delta)) = gamma * ESS(w_prev) for delta by bisection over
// [eps, delta_prev] (first iteration: [eps, 10 * max distance], absolute
// kernel weights). Without a sign change the bisection still converges to a
// bracket end and root_found reports false; the caller decides the fallback.
// kc supplies the kernel kind; kc.delta is ignored.
ReweightResult reweight_solve_delta(const ParticlePopulation& pop, double gamma,
                                    const KernelConfig& kc);

// Multinomial resample when ESS < ess_threshold, identity otherwise. Resampled
// weights are uniform.
ParticlePopulation resample_particles(const ParticlePopulation& pop,
                                      double ess_threshold, RandomStream& rng);

// One MH move per positive-weight particle: Gaussian random walk with twice
// the weighted per-coordinate particle variance, kernel-ratio acceptance at
// pop.delta (kc.delta is ignored). Returns the population acceptance rate of
// the sweep and records it on the population.
double move_step(ParticlePopulation& pop, const Model& model,
                 const KernelConfig& kc, RandomStream& rng);

struct SmcSettings {
    size_t n_particles = 256;
    double gamma = 0.9;         // per-iteration ESS decay target
    double ess_threshold = 0.0;  // resampling trigger E; 0 means N/2
    double stop_rate = 0.01;     // stop when move acceptance falls below this
    size_t max_iterations = 1000;
    KernelKind kernel = KernelKind::gaussian;
};

using SmcSnapshotFn =
    std::function<void(const ParticlePopulation&, double move_acceptance)>;

// Full adaptive loop: prior initialization, reweight/resample/move per
// iteration, stopping when the move acceptance rate drops below stop_rate and
// returning the previous iteration's population. Two consecutive reweight
// fallbacks (no root) also terminate.
ParticlePopulation run_abc_smc(const Model& model, const SummaryVector& s_obs,
                               const ScalingMatrix& sigma,
                               const SmcSettings& settings, RandomStream& rng,
                               const SmcSnapshotFn& snapshot = nullptr);

}  // namespace rsabc
