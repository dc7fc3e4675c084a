#include "rsabc/stratification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsabc/stats.hpp"

namespace rsabc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

StrataSpec::StrataSpec(std::vector<double> breaks) : breakpoints(std::move(breaks)) {
    double prev = 0.0;
    for (double b : breakpoints) {
        require(std::isfinite(b) && b > prev, ErrorCode::invalid_argument,
                "strata breakpoints must be finite, positive and strictly increasing");
        prev = b;
    }
}

size_t StrataSpec::stratum_of(double d) const {
    return static_cast<size_t>(
        std::lower_bound(breakpoints.begin(), breakpoints.end(), d) -
        breakpoints.begin());
}

StrataSpec default_strata(double delta) {
    require(delta > 0.0, ErrorCode::invalid_argument, "delta must be > 0");
    return StrataSpec({delta / 2.0, delta});
}

double mc_likelihood(const std::vector<double>& kernel_values) {
    require(!kernel_values.empty(), ErrorCode::invalid_argument,
            "mc_likelihood needs at least one kernel value");
    double s = 0.0;
    for (double k : kernel_values) {
        require(k >= 0.0, ErrorCode::invalid_argument,
                "kernel values must be nonnegative");
        s += k;
    }
    return s / static_cast<double>(kernel_values.size());
}

double res_likelihood(const std::vector<double>& kernel_values) {
    return mc_likelihood(kernel_values);
}

double log_mc_likelihood(const std::vector<double>& log_kernel_values) {
    require(!log_kernel_values.empty(), ErrorCode::invalid_argument,
            "log_mc_likelihood needs at least one value");
    return logsumexp(log_kernel_values) -
           std::log(static_cast<double>(log_kernel_values.size()));
}

double log_res_likelihood(const std::vector<double>& log_kernel_values) {
    return log_mc_likelihood(log_kernel_values);
}

double strat_likelihood_known(
    const std::vector<double>& omega,
    const std::vector<std::vector<double>>& per_stratum_kernel_values) {
    require(omega.size() == per_stratum_kernel_values.size(),
            ErrorCode::invalid_argument, "strat_likelihood_known: J mismatch");
    double wsum = 0.0;
    for (double w : omega) {
        require(w >= 0.0, ErrorCode::invalid_argument, "omega entries must be >= 0");
        wsum += w;
    }
    require(std::fabs(wsum - 1.0) < 1e-9, ErrorCode::invalid_argument,
            "omega must sum to 1");
    double v = 0.0;
    for (size_t j = 0; j < omega.size(); ++j) {
        require(!per_stratum_kernel_values[j].empty(), ErrorCode::invalid_argument,
                "strat_likelihood_known: empty stratum " + std::to_string(j + 1) +
                    " (per-stratum sampling presumed)");
        double s = 0.0;
        for (double k : per_stratum_kernel_values[j]) s += k;
        v += omega[j] * (s / static_cast<double>(per_stratum_kernel_values[j].size()));
    }
    return v;
}

std::vector<double> estimate_strata_probs(const std::vector<double>& distances,
                                          const StrataSpec& spec) {
    require(!distances.empty(), ErrorCode::invalid_argument,
            "estimate_strata_probs needs at least one distance");
    size_t J = spec.count();
    std::vector<size_t> counts(J, 0);
    for (double d : distances) ++counts[spec.stratum_of(d)];
    std::vector<double> omega(J, 0.0);
    double r1 = static_cast<double>(distances.size());
    double head = 0.0;
    for (size_t j = 0; j + 1 < J; ++j) {
        omega[j] = static_cast<double>(counts[j]) / r1;
        head += omega[j];
    }
    omega[J - 1] = 1.0 - head;  // complement keeps the sum at exactly 1
    return omega;
}

StrataEstimate count_and_sum_strata(const std::vector<double>& distances,
                                    const std::vector<double>& kernel_values,
                                    const StrataSpec& spec) {
    require(distances.size() == kernel_values.size(), ErrorCode::invalid_argument,
            "count_and_sum_strata: distances/kernels length mismatch");
    size_t J = spec.count();
    StrataEstimate est;
    est.n.assign(J, 0);
    est.kernel_sums.assign(J, 0.0);
    for (size_t i = 0; i < distances.size(); ++i) {
        size_t j = spec.stratum_of(distances[i]);
        ++est.n[j];
        est.kernel_sums[j] += kernel_values[i];
    }
    return est;
}

LikelihoodEstimate strat_likelihood(const std::vector<double>& omega_hat,
                                    const std::vector<size_t>& n,
                                    const std::vector<double>& kernel_sums) {
    require(omega_hat.size() == n.size() && n.size() == kernel_sums.size(),
            ErrorCode::invalid_argument, "strat_likelihood: length mismatch");
    require(!omega_hat.empty(), ErrorCode::invalid_argument,
            "strat_likelihood: empty input");
    for (size_t j = 0; j < n.size(); ++j)
        if (n[j] == 0) return LikelihoodEstimate{0.0, true};
    double v = 0.0;
    for (size_t j = 0; j < n.size(); ++j)
        v += omega_hat[j] * (kernel_sums[j] / static_cast<double>(n[j]));
    return LikelihoodEstimate{v, false};
}

LikelihoodEstimate post_strat_likelihood(const std::vector<double>& train_distances,
                                         const std::vector<double>& test_distances,
                                         const std::vector<double>& test_kernel_values,
                                         const StrataSpec& spec) {
    auto omega = estimate_strata_probs(train_distances, spec);
    auto est = count_and_sum_strata(test_distances, test_kernel_values, spec);
    return strat_likelihood(omega, est.n, est.kernel_sums);
}

LogLikelihoodEstimate log_post_strat_likelihood(
    const std::vector<double>& train_distances,
    const std::vector<double>& test_distances,
    const std::vector<double>& test_log_kernel_values, const StrataSpec& spec) {
    require(test_distances.size() == test_log_kernel_values.size(),
            ErrorCode::invalid_argument,
            "log_post_strat_likelihood: test length mismatch");
    size_t J = spec.count();
    auto omega = estimate_strata_probs(train_distances, spec);

    std::vector<size_t> n(J, 0);
    std::vector<std::vector<double>> logs(J);
    for (size_t i = 0; i < test_distances.size(); ++i) {
        size_t j = spec.stratum_of(test_distances[i]);
        ++n[j];
        logs[j].push_back(test_log_kernel_values[i]);
    }
    for (size_t j = 0; j < J; ++j)
        if (n[j] == 0) return LogLikelihoodEstimate{kNegInf, true};

    std::vector<double> terms;
    terms.reserve(J);
    for (size_t j = 0; j < J; ++j) {
        if (omega[j] <= 0.0) continue;  // zero weight contributes nothing
        terms.push_back(std::log(omega[j]) -
                        std::log(static_cast<double>(n[j])) + logsumexp(logs[j]));
    }
    double lv = terms.empty() ? kNegInf : logsumexp(terms);
    return LogLikelihoodEstimate{lv, false};
}

LikelihoodEstimate averaged_strat_likelihood(
    const std::vector<double>& train_distances,
    const std::vector<double>& train_kernel_values,
    const std::vector<double>& test_distances,
    const std::vector<double>& test_kernel_values, const StrataSpec& spec) {
    auto a = post_strat_likelihood(train_distances, test_distances,
                                   test_kernel_values, spec);
    if (a.neglected_stratum) return LikelihoodEstimate{0.0, true};
    auto b = post_strat_likelihood(test_distances, train_distances,
                                   train_kernel_values, spec);
    if (b.neglected_stratum) return LikelihoodEstimate{0.0, true};
    return LikelihoodEstimate{0.5 * (a.value + b.value), false};
}

LogLikelihoodEstimate log_averaged_strat_likelihood(
    const std::vector<double>& train_distances,
    const std::vector<double>& train_log_kernel_values,
    const std::vector<double>& test_distances,
    const std::vector<double>& test_log_kernel_values, const StrataSpec& spec) {
    auto a = log_post_strat_likelihood(train_distances, test_distances,
                                       test_log_kernel_values, spec);
    if (a.neglected_stratum) return LogLikelihoodEstimate{kNegInf, true};
    auto b = log_post_strat_likelihood(test_distances, train_distances,
                                       train_log_kernel_values, spec);
    if (b.neglected_stratum) return LogLikelihoodEstimate{kNegInf, true};
    double lv = logsumexp({a.log_value, b.log_value}) - std::log(2.0);
    return LogLikelihoodEstimate{lv, false};
}

LikelihoodEstimate averaged_strat_likelihood(const std::vector<SummaryVector>& train,
                                             const std::vector<SummaryVector>& test,
                                             const StrataSpec& spec,
                                             const KernelConfig& kc) {
    auto eval = [&](const std::vector<SummaryVector>& set,
                    std::vector<double>& d, std::vector<double>& k) {
        d.resize(set.size());
        k.resize(set.size());
        for (size_t i = 0; i < set.size(); ++i) {
            d[i] = scaled_distance(set[i], kc.s_obs, kc.sigma);
            k[i] = kernel_from_distance(kc.kind, d[i], kc.delta, kc.s_obs.size());
        }
    };
    std::vector<double> train_d, train_k, test_d, test_k;
    eval(train, train_d, train_k);
    eval(test, test_d, test_k);
    return averaged_strat_likelihood(train_d, train_k, test_d, test_k, spec);
}

std::pair<double, double> indicator_strat_collapse_check(
    const std::vector<double>& distances, const StrataSpec& spec, double delta) {
    require(!distances.empty(), ErrorCode::invalid_argument,
            "collapse check needs at least one distance");
    size_t J = spec.count();
    auto omega = estimate_strata_probs(distances, spec);
    std::vector<size_t> n(J, 0);
    std::vector<double> sums(J, 0.0);
    double plain = 0.0;
    for (double d : distances) {
        size_t j = spec.stratum_of(d);
        double k = indicator_kernel(d, delta);
        ++n[j];
        sums[j] += k;
        plain += k;
    }
    plain /= static_cast<double>(distances.size());
    // Self-stratified value: empty strata have omega 0 here and drop out.
    double strat = 0.0;
    for (size_t j = 0; j < J; ++j)
        if (n[j] > 0) strat += omega[j] * (sums[j] / static_cast<double>(n[j]));
    return {strat, plain};
}

}  // namespace rsabc
