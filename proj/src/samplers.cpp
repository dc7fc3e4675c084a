#include "rsabc/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

namespace rsabc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Lower-triangular Cholesky factor of a row-major p x p matrix.
bool cholesky_lower(const std::vector<double>& a, size_t p,
                    std::vector<double>& lower) {
    lower.assign(p * p, 0.0);
    for (size_t i = 0; i < p; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double s = a[i * p + j];
            for (size_t k = 0; k < j; ++k)
                s -= lower[i * p + k] * lower[j * p + k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                lower[i * p + i] = std::sqrt(s);
            } else {
                lower[i * p + j] = s / lower[j * p + j];
            }
        }
    }
    return true;
}

void check_setup(const Model& model, const SummaryVector& s_obs,
                 const ScalingMatrix& sigma, size_t n_iter,
                 const ParameterVector& init, const AdaptiveProposal& proposal) {
    require(n_iter >= 1, ErrorCode::invalid_argument, "n_iter must be >= 1");
    require(s_obs.size() == model.n_summaries(), ErrorCode::invalid_argument,
            "observed summary dimension mismatch");
    require(sigma.size() == model.n_summaries(), ErrorCode::invalid_argument,
            "scaling matrix dimension mismatch");
    require(init.size() == model.n_params(), ErrorCode::invalid_argument,
            "initial parameter dimension mismatch");
    require(proposal.dim() == model.n_params(), ErrorCode::invalid_argument,
            "proposal dimension mismatch");
    require(std::isfinite(model.log_prior(init)), ErrorCode::startup,
            "initial state outside prior support");
}

// Scaled distances of summary-matrix rows from s_obs, through the same
// scaled_distance used everywhere else.
void row_distances(const Matrix& s, const SummaryVector& s_obs,
                   const ScalingMatrix& sigma, std::vector<double>& d,
                   SummaryVector& buf) {
    d.resize(s.rows);
    buf.resize(s.cols);
    for (size_t r = 0; r < s.rows; ++r) {
        const double* row = s.row(r);
        std::copy(row, row + s.cols, buf.begin());
        d[r] = scaled_distance(buf, s_obs, sigma);
    }
}

void log_kernels(KernelKind kind, const std::vector<double>& d, double delta,
                 size_t n_s, std::vector<double>& out) {
    out.resize(d.size());
    for (size_t i = 0; i < d.size(); ++i)
        out[i] = log_kernel_from_distance(kind, d[i], delta, n_s);
}

void finish_chain(Chain& chain, size_t accepted, size_t n_iter, double wall,
                  double delta, const ScalingMatrix& sigma,
                  const ParameterVector& theta, const AdaptiveProposal& proposal,
                  std::vector<double> history) {
    chain.acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(n_iter);
    chain.wall_seconds = wall;
    chain.final_delta = delta;
    chain.final_sigma = sigma;
    chain.final_theta = theta;
    chain.delta_history = std::move(history);
    chain.final_proposal_cov = proposal.covariance();
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

bool mh_accept(double lik_new, double prior_new, double lik_old,
               double prior_old, double q_ratio, RandomStream& rng) {
    require(std::isfinite(lik_old) && std::isfinite(prior_old) &&
                lik_old > 0.0 && prior_old > 0.0,
            ErrorCode::internal, "retained MH state must have positive mass");
    require(lik_new >= 0.0 && prior_new >= 0.0 && q_ratio >= 0.0,
            ErrorCode::invalid_argument, "MH factors must be nonnegative");
    double ratio = (lik_new * prior_new) / (lik_old * prior_old) * q_ratio;
    return rng.uniform() < ratio;
}

bool mh_accept_log(double log_lik_new, double log_prior_new, double log_lik_old,
                   double log_prior_old, double log_q_ratio, RandomStream& rng) {
    require(std::isfinite(log_lik_old + log_prior_old), ErrorCode::internal,
            "retained MH state must have finite log mass");
    double log_alpha = (log_lik_new + log_prior_new) -
                       (log_lik_old + log_prior_old) + log_q_ratio;
    if (std::isnan(log_alpha)) return false;
    // 1 - uniform() lies in (0, 1], so the log is finite.
    return std::log(1.0 - rng.uniform()) < log_alpha;
}

AdaptiveProposal::AdaptiveProposal(std::vector<double> diag_variances,
                                   size_t refresh_period, bool adapt)
    : p_(diag_variances.size()), period_(refresh_period), adapt_(adapt) {
    require(p_ >= 1, ErrorCode::invalid_argument,
            "proposal dimension must be >= 1");
    require(period_ >= 1, ErrorCode::invalid_argument,
            "refresh period must be >= 1");
    cov_.assign(p_ * p_, 0.0);
    chol_.assign(p_ * p_, 0.0);
    for (size_t i = 0; i < p_; ++i) {
        require(std::isfinite(diag_variances[i]) && diag_variances[i] > 0.0,
                ErrorCode::invalid_argument, "proposal variances must be > 0");
        cov_[i * p_ + i] = diag_variances[i];
        chol_[i * p_ + i] = std::sqrt(diag_variances[i]);
    }
    sum_.assign(p_, 0.0);
    sum_outer_.assign(p_ * p_, 0.0);
}

ParameterVector AdaptiveProposal::propose(const ParameterVector& theta,
                                          RandomStream& rng) const {
    require(theta.size() == p_, ErrorCode::invalid_argument,
            "proposal dimension mismatch");
    std::vector<double> z(p_);
    for (auto& v : z) v = rng.normal();
    ParameterVector out(theta);
    for (size_t i = 0; i < p_; ++i) {
        double acc = 0.0;
        for (size_t k = 0; k <= i; ++k) acc += chol_[i * p_ + k] * z[k];
        out[i] += acc;
    }
    return out;
}

void AdaptiveProposal::record(const ParameterVector& theta) {
    if (!adapt_) return;
    require(theta.size() == p_, ErrorCode::invalid_argument,
            "proposal dimension mismatch");
    ++n_seen_;
    for (size_t i = 0; i < p_; ++i) {
        sum_[i] += theta[i];
        for (size_t j = 0; j < p_; ++j)
            sum_outer_[i * p_ + j] += theta[i] * theta[j];
    }
    if (n_seen_ >= 2 && n_seen_ % period_ == 0) refresh();
}

void AdaptiveProposal::refresh() {
    double n = static_cast<double>(n_seen_);
    double scale = 2.38 * 2.38 / static_cast<double>(p_);
    std::vector<double> c(p_ * p_);
    for (size_t i = 0; i < p_; ++i)
        for (size_t j = 0; j < p_; ++j) {
            double cov_ij =
                (sum_outer_[i * p_ + j] - sum_[i] * sum_[j] / n) / (n - 1.0);
            c[i * p_ + j] = scale * cov_ij;
        }
    for (size_t i = 0; i < p_; ++i) c[i * p_ + i] += 1e-10;
    std::vector<double> lower;
    if (cholesky_lower(c, p_, lower)) {  // else keep the last valid covariance
        cov_ = std::move(c);
        chol_ = std::move(lower);
    }
}

void AdaptiveProposal::set_covariance(const std::vector<double>& cov) {
    require(cov.size() == p_ * p_, ErrorCode::invalid_argument,
            "covariance size mismatch");
    std::vector<double> lower;
    require(cholesky_lower(cov, p_, lower), ErrorCode::invalid_argument,
            "covariance must be symmetric positive definite");
    cov_ = cov;
    chol_ = std::move(lower);
}

double tune_initial_delta(const std::vector<double>& distances, double psi) {
    require(!distances.empty(), ErrorCode::invalid_argument,
            "cannot tune a threshold from an empty distance vector");
    require(psi > 0.0 && psi <= 100.0, ErrorCode::invalid_argument,
            "psi must lie in (0, 100]");
    return nearest_rank_percentile(distances, psi);
}

ThresholdSchedule maybe_reduce_delta(const ThresholdSchedule& schedule,
                                     bool accepted,
                                     const std::vector<double>& distances,
                                     double psi) {
    ThresholdSchedule out = schedule;
    if (!accepted) return out;
    require(!distances.empty(), ErrorCode::invalid_argument,
            "reduction check needs distances");
    size_t below = 0;
    for (double d : distances)
        if (d < out.delta) ++below;
    if (static_cast<double>(below) <
        0.05 * static_cast<double>(distances.size()))
        return out;
    double d_psi = tune_initial_delta(distances, psi);
    double next = std::min(out.delta, d_psi);
    if (next > 0.0 && next < out.delta) {
        out.delta = next;
        out.history.push_back(next);
    }
    return out;
}

Chain run_pm_abc_mcmc(const Model& model, const SummaryVector& s_obs, size_t M,
                      double delta, const ScalingMatrix& sigma, size_t n_iter,
                      const ParameterVector& init, AdaptiveProposal& proposal,
                      RandomStream& rng, const SamplerOptions& opt) {
    require(M >= 1, ErrorCode::invalid_argument, "M must be >= 1");
    require(delta > 0.0, ErrorCode::invalid_argument, "delta must be > 0");
    check_setup(model, s_obs, sigma, n_iter, init, proposal);
    size_t n_s = model.n_summaries();

    std::vector<double> lk(M);
    auto estimate = [&](const ParameterVector& th) {
        for (size_t m = 0; m < M; ++m) {
            Dataset x = model.simulate(th, rng);
            SummaryVector s = model.summarize(x);
            double d = scaled_distance(s, s_obs, sigma);
            lk[m] = log_kernel_from_distance(opt.kernel, d, delta, n_s);
        }
        return log_mc_likelihood(lk);
    };

    ParameterVector theta = init;
    double lp = model.log_prior(theta);
    double ll = kNegInf;
    for (size_t a = 0; a < opt.startup_retries && !(ll > kNegInf); ++a)
        ll = estimate(theta);
    require(ll > kNegInf, ErrorCode::startup,
            "no positive initial likelihood within the retry budget");

    Chain chain;
    chain.param_names = model.param_names();
    chain.log_scale = model.log_scale();
    chain.rows.reserve(n_iter);
    size_t accepted = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (size_t t = 1; t <= n_iter; ++t) {
        ParameterVector prop = proposal.propose(theta, rng);
        double lp_new = model.log_prior(prop);
        bool acc = false;
        if (lp_new > kNegInf) {
            double ll_new = estimate(prop);
            acc = mh_accept_log(ll_new, lp_new, ll, lp, 0.0, rng);
            if (acc) {
                theta = std::move(prop);
                ll = ll_new;
                lp = lp_new;
                ++accepted;
            }
        }
        proposal.record(theta);
        chain.rows.push_back(ChainRow{theta, ll, acc, delta, {}});
    }
    finish_chain(chain, accepted, n_iter, elapsed_seconds(t0), delta, sigma,
                 theta, proposal, {delta});
    return chain;
}

Chain run_r_abc_mcmc(const Model& model, const SummaryVector& s_obs, size_t R,
                     ThresholdSchedule schedule, const ScalingMatrix& initial_sigma,
                     size_t n_iter, size_t k_burnin, const ParameterVector& init,
                     AdaptiveProposal& proposal, RandomStream& rng,
                     const SamplerOptions& opt) {
    require(R >= 1, ErrorCode::invalid_argument, "R must be >= 1");
    require(schedule.psi > 0.0 && schedule.psi <= 100.0,
            ErrorCode::invalid_argument, "psi must lie in (0, 100]");
    check_setup(model, s_obs, initial_sigma, n_iter, init, proposal);
    size_t n_s = model.n_summaries();
    ScalingMatrix sigma = initial_sigma;
    BlockScheme scheme = model.default_scheme();

    ParameterVector theta = init;
    double lp = model.log_prior(theta);

    Dataset x0 = model.simulate(theta, rng);
    IndexMatrix u = make_index_matrix(R, scheme, x0, rng);

    Matrix cur_s;
    std::vector<double> cur_d, cur_lk;
    SummaryVector buf;
    double ll = kNegInf;
    for (size_t a = 0; a < opt.startup_retries && !(ll > kNegInf); ++a) {
        if (a > 0) x0 = model.simulate(theta, rng);
        model.resample_summaries(x0, u, scheme, cur_s);
        row_distances(cur_s, s_obs, sigma, cur_d, buf);
        if (schedule.delta <= 0.0)
            schedule.delta = tune_initial_delta(cur_d, schedule.psi);
        log_kernels(opt.kernel, cur_d, schedule.delta, n_s, cur_lk);
        ll = log_res_likelihood(cur_lk);
    }
    require(ll > kNegInf, ErrorCode::startup,
            "no positive initial likelihood within the retry budget");
    if (schedule.history.empty()) schedule.history.push_back(schedule.delta);
    size_t period = schedule.check_period ? schedule.check_period
                                          : std::max<size_t>(1, n_iter / 20);

    Matrix collected(k_burnin * R, n_s);
    size_t collect_rows = 0;

    Chain chain;
    chain.param_names = model.param_names();
    chain.log_scale = model.log_scale();
    chain.rows.reserve(n_iter);
    Matrix prop_s;
    std::vector<double> prop_d, prop_lk;
    size_t accepted = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (size_t t = 1; t <= n_iter; ++t) {
        if (k_burnin > 0 && t == k_burnin + 1 && collect_rows >= 2) {
            Matrix used(collect_rows, n_s);
            std::copy(collected.data.begin(),
                      collected.data.begin() +
                          static_cast<std::ptrdiff_t>(collect_rows * n_s),
                      used.data.begin());
            sigma = update_sigma_mad(used);
            row_distances(cur_s, s_obs, sigma, cur_d, buf);
            if (schedule.tune) {
                // The refresh changes the distance scale entirely, so the
                // threshold restarts from the retained state's psi percentile
                // on the new scale; gated reductions then resume from there.
                schedule.delta = tune_initial_delta(cur_d, schedule.psi);
                schedule.pending = false;
                schedule.history.push_back(schedule.delta);
            }
            log_kernels(opt.kernel, cur_d, schedule.delta, n_s, cur_lk);
            ll = log_res_likelihood(cur_lk);
            require(ll > kNegInf, ErrorCode::degenerate,
                    "retained state lost support at the scaling update");
        }
        double delta_used = schedule.delta;
        ParameterVector prop = proposal.propose(theta, rng);
        double lp_new = model.log_prior(prop);
        bool acc = false;
        if (lp_new > kNegInf) {
            Dataset x = model.simulate(prop, rng);
            model.resample_summaries(x, u, scheme, prop_s);
            if (t <= k_burnin) {
                std::copy(prop_s.data.begin(), prop_s.data.end(),
                          collected.data.begin() +
                              static_cast<std::ptrdiff_t>(collect_rows * n_s));
                collect_rows += R;
            }
            row_distances(prop_s, s_obs, sigma, prop_d, buf);
            log_kernels(opt.kernel, prop_d, schedule.delta, n_s, prop_lk);
            double ll_new = log_res_likelihood(prop_lk);
            acc = mh_accept_log(ll_new, lp_new, ll, lp, 0.0, rng);
            if (acc) {
                theta = std::move(prop);
                ll = ll_new;
                lp = lp_new;
                std::swap(cur_s, prop_s);
                cur_d.swap(prop_d);
                ++accepted;
            }
        }
        if (schedule.tune) {
            bool due = (t % period == 0);
            if (acc && (due || schedule.pending)) {
                ThresholdSchedule next =
                    maybe_reduce_delta(schedule, true, cur_d, schedule.psi);
                next.pending = false;
                if (next.delta < schedule.delta) {
                    log_kernels(opt.kernel, cur_d, next.delta, n_s, cur_lk);
                    double ll2 = log_res_likelihood(cur_lk);
                    if (ll2 > kNegInf) {
                        schedule = std::move(next);
                        ll = ll2;
                    } else {
                        // the reduction would strand the retained state
                        // (indicator kernel); keep the old threshold
                        schedule.pending = false;
                    }
                } else {
                    schedule = std::move(next);
                }
            } else if (due) {
                schedule.pending = true;
            }
        }
        proposal.record(theta);
        chain.rows.push_back(ChainRow{theta, ll, acc, delta_used, {}});
    }
    finish_chain(chain, accepted, n_iter, elapsed_seconds(t0), schedule.delta,
                 sigma, theta, proposal, schedule.history);
    return chain;
}

namespace {

Chain run_strat_mcmc(const Model& model, const SummaryVector& s_obs, size_t R1,
                     size_t R2, const StrataSpec& spec, double delta,
                     const ScalingMatrix& sigma, size_t n_iter,
                     const ParameterVector& init, AdaptiveProposal& proposal,
                     RandomStream& rng, const SamplerOptions& opt,
                     bool averaged) {
    require(R1 >= 1 && R2 >= 1, ErrorCode::invalid_argument,
            "R1 and R2 must be >= 1");
    require(delta > 0.0, ErrorCode::invalid_argument, "delta must be > 0");
    check_setup(model, s_obs, sigma, n_iter, init, proposal);
    size_t n_s = model.n_summaries();
    BlockScheme scheme = model.default_scheme();

    ParameterVector theta = init;
    double lp = model.log_prior(theta);

    Dataset shape = model.simulate(theta, rng);
    IndexMatrix u1 = make_index_matrix(R1, scheme, shape, rng);
    IndexMatrix u2 = make_index_matrix(R2, scheme, shape, rng);

    Matrix s1, s2;
    std::vector<double> d1, d2, lk1, lk2;
    SummaryVector buf;

    auto eval_at = [&](const ParameterVector& th, std::vector<size_t>* counts) {
        Dataset xt = model.simulate(th, rng);  // training draw
        Dataset xs = model.simulate(th, rng);  // testing draw
        model.resample_summaries(xt, u1, scheme, s1);
        model.resample_summaries(xs, u2, scheme, s2);
        row_distances(s1, s_obs, sigma, d1, buf);
        row_distances(s2, s_obs, sigma, d2, buf);
        log_kernels(opt.kernel, d2, delta, n_s, lk2);
        LogLikelihoodEstimate est;
        if (averaged) {
            log_kernels(opt.kernel, d1, delta, n_s, lk1);
            est = log_averaged_strat_likelihood(d1, lk1, d2, lk2, spec);
        } else {
            est = log_post_strat_likelihood(d1, d2, lk2, spec);
        }
        if (counts) {
            counts->assign(spec.count(), 0);
            for (double d : d2) ++(*counts)[spec.stratum_of(d)];
        }
        return est;
    };

    std::vector<size_t> cur_counts, prop_counts;
    std::vector<size_t>* cur_counts_ptr =
        opt.record_strata_counts ? &cur_counts : nullptr;
    LogLikelihoodEstimate est{kNegInf, false};
    for (size_t a = 0; a < opt.startup_retries; ++a) {
        est = eval_at(theta, cur_counts_ptr);
        if (!est.neglected_stratum && est.log_value > kNegInf) break;
    }
    require(!est.neglected_stratum && est.log_value > kNegInf,
            ErrorCode::startup,
            "no start with every stratum populated within the retry budget");
    double ll = est.log_value;

    Chain chain;
    chain.param_names = model.param_names();
    chain.log_scale = model.log_scale();
    chain.rows.reserve(n_iter);
    size_t accepted = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (size_t t = 1; t <= n_iter; ++t) {
        ParameterVector prop = proposal.propose(theta, rng);
        double lp_new = model.log_prior(prop);
        bool acc = false;
        if (lp_new > kNegInf) {
            LogLikelihoodEstimate cand = eval_at(
                prop, opt.record_strata_counts ? &prop_counts : nullptr);
            // a neglected stratum rejects outright (zero estimate)
            if (!cand.neglected_stratum && cand.log_value > kNegInf)
                acc = mh_accept_log(cand.log_value, lp_new, ll, lp, 0.0, rng);
            if (acc) {
                theta = std::move(prop);
                ll = cand.log_value;
                lp = lp_new;
                cur_counts.swap(prop_counts);
                ++accepted;
            }
        }
        proposal.record(theta);
        chain.rows.push_back(ChainRow{theta, ll, acc, delta, cur_counts});
    }
    finish_chain(chain, accepted, n_iter, elapsed_seconds(t0), delta, sigma,
                 theta, proposal, {delta});
    return chain;
}

}  // namespace

Chain run_rs_abc_mcmc(const Model& model, const SummaryVector& s_obs, size_t R1,
                      size_t R2, const StrataSpec& spec, double delta,
                      const ScalingMatrix& sigma, size_t n_iter,
                      const ParameterVector& init, AdaptiveProposal& proposal,
                      RandomStream& rng, const SamplerOptions& opt) {
    return run_strat_mcmc(model, s_obs, R1, R2, spec, delta, sigma, n_iter,
                          init, proposal, rng, opt, false);
}

Chain run_xrs_abc_mcmc(const Model& model, const SummaryVector& s_obs, size_t R1,
                       size_t R2, const StrataSpec& spec, double delta,
                       const ScalingMatrix& sigma, size_t n_iter,
                       const ParameterVector& init, AdaptiveProposal& proposal,
                       RandomStream& rng, const SamplerOptions& opt) {
    return run_strat_mcmc(model, s_obs, R1, R2, spec, delta, sigma, n_iter,
                          init, proposal, rng, opt, true);
}

Chain run_mh_with_loglik(const Model& model,
                         const std::function<double(const ParameterVector&)>& log_lik,
                         size_t n_iter, const ParameterVector& init,
                         AdaptiveProposal& proposal, RandomStream& rng) {
    require(n_iter >= 1, ErrorCode::invalid_argument, "n_iter must be >= 1");
    require(init.size() == model.n_params(), ErrorCode::invalid_argument,
            "initial parameter dimension mismatch");
    require(proposal.dim() == model.n_params(), ErrorCode::invalid_argument,
            "proposal dimension mismatch");
    require(std::isfinite(model.log_prior(init)), ErrorCode::startup,
            "initial state outside prior support");

    ParameterVector theta = init;
    double lp = model.log_prior(theta);
    double ll = log_lik(theta);
    require(std::isfinite(ll), ErrorCode::startup,
            "log likelihood not finite at the initial state");

    Chain chain;
    chain.param_names = model.param_names();
    chain.log_scale = model.log_scale();
    chain.rows.reserve(n_iter);
    size_t accepted = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (size_t t = 1; t <= n_iter; ++t) {
        ParameterVector prop = proposal.propose(theta, rng);
        double lp_new = model.log_prior(prop);
        bool acc = false;
        if (lp_new > kNegInf) {
            double ll_new = log_lik(prop);
            acc = mh_accept_log(ll_new, lp_new, ll, lp, 0.0, rng);
            if (acc) {
                theta = std::move(prop);
                ll = ll_new;
                lp = lp_new;
                ++accepted;
            }
        }
        proposal.record(theta);
        chain.rows.push_back(ChainRow{theta, ll, acc, 0.0, {}});
    }
    finish_chain(chain, accepted, n_iter, elapsed_seconds(t0), 0.0,
                 ScalingMatrix::identity(model.n_summaries()), theta, proposal,
                 {});
    return chain;
}

}  // namespace rsabc
