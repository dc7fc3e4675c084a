#pragma once

#include <functional>

#include "rsabc/chain.hpp"
#include "rsabc/models.hpp"
#include "rsabc/stratification.hpp"

namespace rsabc {

// Metropolis-Hastings acceptance with probability
// min{1, (lik_new*prior_new)/(lik_old*prior_old) * q_ratio}. The retained
// state must have strictly positive mass.
bool mh_accept(double lik_new, double prior_new, double lik_old,
               double prior_old, double q_ratio, RandomStream& rng);

// Log-domain twin used by the samplers; kernel values at small delta underflow
// linear doubles there. Old-state log mass must be finite.
bool mh_accept_log(double log_lik_new, double log_prior_new, double log_lik_old,
                   double log_prior_old, double log_q_ratio, RandomStream& rng);

// Gaussian random-walk proposal with optional covariance adaptation: every
// `refresh_period` recorded states the covariance becomes
// 2.38^2/p * cov(all recorded states) + 1e-10 * I. A non-SPD refresh keeps the
// previous factor.
class AdaptiveProposal {
public:
    AdaptiveProposal(std::vector<double> diag_variances,
                     size_t refresh_period = 500, bool adapt = true);

    ParameterVector propose(const ParameterVector& theta, RandomStream& rng) const;

    // Feed the retained chain state, once per iteration.
    void record(const ParameterVector& theta);

    size_t dim() const { return p_; }
    bool adapting() const { return adapt_; }
    const std::vector<double>& covariance() const { return cov_; }
    // Stage handoff: install a full covariance (row-major p x p); must be SPD.
    void set_covariance(const std::vector<double>& cov);

private:
    void refresh();

    size_t p_, period_;
    bool adapt_;
    std::vector<double> cov_, chol_;  // row-major p x p, chol_ lower triangular
    size_t n_seen_ = 0;
    std::vector<double> sum_, sum_outer_;
};

// Self-tuning threshold state. delta = 0 requests tuning from the distances
// of the initial state; check_period = 0 means every 5% of the run length.
struct ThresholdSchedule {
    double delta = 0.0;
    double psi = 5.0;  // percentile level, percent units
    size_t check_period = 0;
    std::vector<double> history;
    bool pending = false;  // scheduled check deferred to the next acceptance
    bool tune = true;      // false freezes delta for the whole run
};

// psi-percentile (nearest rank) of the distances.
double tune_initial_delta(const std::vector<double>& distances, double psi);

// Reduction rule: only when the proposal was accepted and at least 5% of the
// distances fall below the current threshold; then delta := min(delta, d_psi).
ThresholdSchedule maybe_reduce_delta(const ThresholdSchedule& schedule,
                                     bool accepted,
                                     const std::vector<double>& distances,
                                     double psi);

struct SamplerOptions {
    KernelKind kernel = KernelKind::gaussian;
    size_t startup_retries = 100;
    bool record_strata_counts = true;
};

// Pseudo-marginal ABC-MCMC: M independent simulator draws per proposal, plain
// Monte Carlo kernel average, fixed delta and sigma.
Chain run_pm_abc_mcmc(const Model& model, const SummaryVector& s_obs,
                      size_t M, double delta,
                      const ScalingMatrix& sigma, size_t n_iter,
                      const ParameterVector& init, AdaptiveProposal& proposal,
                      RandomStream& rng, const SamplerOptions& opt = {});

// Resampling ABC-MCMC: one simulator draw per proposal, R resamples under a
// frozen index matrix, self-tuned threshold, sigma refreshed once from the
// summaries collected over the first k_burnin iterations (k_burnin = 0 keeps
// the initial sigma for the whole run).
Chain run_r_abc_mcmc(const Model& model, const SummaryVector& s_obs,
                     size_t R, ThresholdSchedule schedule,
                     const ScalingMatrix& initial_sigma, size_t n_iter,
                     size_t k_burnin, const ParameterVector& init,
                     AdaptiveProposal& proposal, RandomStream& rng,
                     const SamplerOptions& opt = {});

// Stratified resampling ABC-MCMC: two simulator draws per proposal (train and
// test), post-stratified estimate, fixed delta/sigma/strata. Proposals whose
// test resamples miss a stratum are rejected outright.
Chain run_rs_abc_mcmc(const Model& model, const SummaryVector& s_obs,
                      size_t R1, size_t R2,
                      const StrataSpec& spec, double delta,
                      const ScalingMatrix& sigma, size_t n_iter,
                      const ParameterVector& init, AdaptiveProposal& proposal,
                      RandomStream& rng, const SamplerOptions& opt = {});

// As run_rs_abc_mcmc with the averaged exchanged-roles estimate in the ratio.
Chain run_xrs_abc_mcmc(const Model& model, const SummaryVector& s_obs,
                       size_t R1, size_t R2,
                       const StrataSpec& spec, double delta,
                       const ScalingMatrix& sigma, size_t n_iter,
                       const ParameterVector& init, AdaptiveProposal& proposal,
                       RandomStream& rng, const SamplerOptions& opt = {});

// Plain MH against an externally supplied log likelihood (no simulation);
// used for reference runs where the summary likelihood is available in closed
// form.
Chain run_mh_with_loglik(const Model& model,
                         const std::function<double(const ParameterVector&)>& log_lik,
                         size_t n_iter, const ParameterVector& init,
                         AdaptiveProposal& proposal, RandomStream& rng);

}  // namespace rsabc
