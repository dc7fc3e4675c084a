#pragma once

#include <cstddef>
#include <vector>

#include "rsabc/kernels.hpp"

namespace rsabc {

// Distance breakpoints b_1 < ... < b_{J-1} partitioning [0, inf) into J strata
// on the scaled-distance axis. Intervals are left-open/right-closed
// (b_{j-1}, b_j], with the first stratum including 0; a distance exactly equal
// to a breakpoint therefore lands in the stratum it bounds from above.
struct StrataSpec {
    std::vector<double> breakpoints;  // empty => single stratum

    StrataSpec() = default;
    explicit StrataSpec(std::vector<double> breaks);

    size_t count() const { return breakpoints.size() + 1; }
    size_t stratum_of(double d) const;
};

// Three strata split at (delta/2, delta).
StrataSpec default_strata(double delta);

struct StrataEstimate {
    std::vector<double> omega_hat;     // estimated strata probabilities
    std::vector<size_t> n;             // test-set counts per stratum
    std::vector<double> kernel_sums;   // test-set kernel sums per stratum
};

struct LikelihoodEstimate {
    double value = 0.0;
    bool neglected_stratum = false;
};

// Log-domain counterpart used inside the samplers, where kernel values at
// small delta underflow linear doubles.
struct LogLikelihoodEstimate {
    double log_value = 0.0;
    bool neglected_stratum = false;
};

// Plain Monte Carlo / pseudo-marginal estimate: mean of kernel values.
double mc_likelihood(const std::vector<double>& kernel_values);

// Bootstrapped estimate over resampled summaries; same formula as
// mc_likelihood (uniform weights 1/R), kept distinct for call-site clarity.
double res_likelihood(const std::vector<double>& kernel_values);

double log_mc_likelihood(const std::vector<double>& log_kernel_values);
double log_res_likelihood(const std::vector<double>& log_kernel_values);

// Known-omega stratified estimator with per-stratum conditional draws:
// sum_j omega_j * mean(values_j). All strata must carry at least one draw.
double strat_likelihood_known(
    const std::vector<double>& omega,
    const std::vector<std::vector<double>>& per_stratum_kernel_values);

// omega_hat from training distances: counts/R1, last stratum by complement so
// the probabilities sum to exactly 1.
std::vector<double> estimate_strata_probs(const std::vector<double>& distances,
                                          const StrataSpec& spec);

StrataEstimate count_and_sum_strata(const std::vector<double>& distances,
                                    const std::vector<double>& kernel_values,
                                    const StrataSpec& spec);

// Post-stratified estimate. Any empty stratum forces (0, neglected). The sum
// is grouped as omega_j * (kernel_sum_j / n_j) so that the single-stratum case
// reproduces res_likelihood bit-for-bit.
LikelihoodEstimate strat_likelihood(const std::vector<double>& omega_hat,
                                    const std::vector<size_t>& n,
                                    const std::vector<double>& kernel_sums);

// Convenience composition: omega from train distances, counts/sums from the
// test set.
LikelihoodEstimate post_strat_likelihood(const std::vector<double>& train_distances,
                                         const std::vector<double>& test_distances,
                                         const std::vector<double>& test_kernel_values,
                                         const StrataSpec& spec);

LogLikelihoodEstimate log_post_strat_likelihood(
    const std::vector<double>& train_distances,
    const std::vector<double>& test_distances,
    const std::vector<double>& test_log_kernel_values, const StrataSpec& spec);

// Averaged exchanged-samples estimate: mean of the post-stratified estimates
// with the train/test roles swapped; a neglected stratum in either component
// zeroes the whole estimate.
LikelihoodEstimate averaged_strat_likelihood(const std::vector<double>& train_distances,
                                             const std::vector<double>& train_kernel_values,
                                             const std::vector<double>& test_distances,
                                             const std::vector<double>& test_kernel_values,
                                             const StrataSpec& spec);

LogLikelihoodEstimate log_averaged_strat_likelihood(
    const std::vector<double>& train_distances,
    const std::vector<double>& train_log_kernel_values,
    const std::vector<double>& test_distances,
    const std::vector<double>& test_log_kernel_values, const StrataSpec& spec);

// Kernel evaluation context for the summary-level overload.
struct KernelConfig {
    KernelKind kind = KernelKind::gaussian;
    double delta = 1.0;
    ScalingMatrix sigma;
    SummaryVector s_obs;
};

LikelihoodEstimate averaged_strat_likelihood(const std::vector<SummaryVector>& train,
                                             const std::vector<SummaryVector>& test,
                                             const StrataSpec& spec,
                                             const KernelConfig& kc);

// Indicator-kernel self-stratification collapse: omega and counts estimated on
// the same draw set. Returns {stratified value, plain MC value}; the two are
// equal up to fp noise.
std::pair<double, double> indicator_strat_collapse_check(
    const std::vector<double>& distances, const StrataSpec& spec, double delta);

}  // namespace rsabc
