#include <cmath>
#include <numbers>

#include "rsabc/models.hpp"

namespace rsabc {

GaussianModel::GaussianModel(size_t n_obs, double prior_mean, double prior_sd)
    : n_obs_(n_obs), m0_(prior_mean), s0_(prior_sd) {
    require(n_obs >= 1, ErrorCode::invalid_argument, "n_obs must be >= 1");
    require(prior_sd > 0.0, ErrorCode::invalid_argument, "prior sd must be > 0");
}

Dataset GaussianModel::simulate(const ParameterVector& theta,
                                RandomStream& rng) const {
    require(theta.size() == 1, ErrorCode::invalid_argument, "theta must be scalar");
    ScalarSample out;
    out.values.resize(n_obs_);
    for (double& v : out.values) v = theta[0] + rng.normal();
    return out;
}

SummaryVector GaussianModel::summarize(const Dataset& x) const {
    const auto& s = std::get<ScalarSample>(x);
    return {mean(s.values)};
}

double GaussianModel::log_prior(const ParameterVector& theta) const {
    require(theta.size() == 1, ErrorCode::invalid_argument, "theta must be scalar");
    double z = (theta[0] - m0_) / s0_;
    return -0.5 * z * z - std::log(s0_) -
           0.5 * std::log(2.0 * std::numbers::pi);
}

ParameterVector GaussianModel::sample_prior(RandomStream& rng) const {
    return {m0_ + s0_ * rng.normal()};
}

std::pair<double, double> gaussian_exact_posterior(double m0, double sigma0,
                                                   double xbar, size_t n_obs) {
    require(sigma0 > 0.0, ErrorCode::invalid_argument, "prior sd must be > 0");
    double prior_prec = 1.0 / (sigma0 * sigma0);
    double prec = prior_prec + static_cast<double>(n_obs);
    double mean = (m0 * prior_prec + static_cast<double>(n_obs) * xbar) / prec;
    return {mean, std::sqrt(1.0 / prec)};
}

double gaussian_exact_summary_loglik(double theta, double s, size_t n_obs) {
    require(n_obs >= 1, ErrorCode::invalid_argument, "n_obs must be >= 1");
    double var = 1.0 / static_cast<double>(n_obs);
    double z = s - theta;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - z * z / (2.0 * var);
}

}  // namespace rsabc
