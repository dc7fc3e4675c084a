#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rsabc/chain.hpp"
#include "rsabc/dataset.hpp"
#include "rsabc/resampling.hpp"
#include "rsabc/rng.hpp"
#include "rsabc/stats.hpp"

namespace rsabc {

class Model {
public:
    virtual ~Model() = default;

    virtual std::string name() const = 0;
    virtual size_t n_params() const = 0;
    virtual size_t n_summaries() const = 0;
    virtual std::vector<std::string> param_names() const = 0;

    // Coordinates sampled on the log scale; default none.
    virtual std::vector<bool> log_scale() const {
        return std::vector<bool>(n_params(), false);
    }

    virtual Dataset simulate(const ParameterVector& theta, RandomStream& rng) const = 0;
    virtual SummaryVector summarize(const Dataset& x) const = 0;
    virtual double log_prior(const ParameterVector& theta) const = 0;
    virtual ParameterVector sample_prior(RandomStream& rng) const = 0;
    virtual BlockScheme default_scheme() const { return BlockScheme::iid(); }

    // Summaries of all R resamples of x under the frozen index matrix u.
    // The base implementation gathers and summarizes row by row; models
    // override it only with exact (bit-identical) fast decompositions.
    virtual void resample_summaries(const Dataset& x, const IndexMatrix& u,
                                    const BlockScheme& scheme, Matrix& out) const;

    ParameterVector natural(const ParameterVector& sampling) const;
    ParameterVector sampling_from_natural(const ParameterVector& natural) const;
};

// ---- Gaussian toy: x ~ N(theta, 1), summary = sample mean, conjugate prior

class GaussianModel : public Model {
public:
    explicit GaussianModel(size_t n_obs = 1000, double prior_mean = 0.1,
                           double prior_sd = 0.2);

    std::string name() const override { return "gaussian"; }
    size_t n_params() const override { return 1; }
    size_t n_summaries() const override { return 1; }
    std::vector<std::string> param_names() const override { return {"theta"}; }
    Dataset simulate(const ParameterVector& theta, RandomStream& rng) const override;
    SummaryVector summarize(const Dataset& x) const override;
    double log_prior(const ParameterVector& theta) const override;
    ParameterVector sample_prior(RandomStream& rng) const override;

    size_t n_obs() const { return n_obs_; }
    double prior_mean() const { return m0_; }
    double prior_sd() const { return s0_; }

private:
    size_t n_obs_;
    double m0_, s0_;
};

// Conjugate posterior (mean, sd) for known unit observation variance.
std::pair<double, double> gaussian_exact_posterior(double m0, double sigma0,
                                                   double xbar, size_t n_obs);

// log N(s; theta, 1/n_obs): the sampling density of the mean summary.
double gaussian_exact_summary_loglik(double theta, double s, size_t n_obs);

// ---- g-and-k: quantile-defined distribution, percentile summaries

// F^{-1} at normal deviate r (simulate plugs r* ~ N(0,1) straight in).
double gk_from_normal(double r, double A, double B, double c, double g, double k);
// F^{-1} at probability z in (0,1).
double gk_quantile(double z, double A, double B, double c, double g, double k);

class GkModel : public Model {
public:
    explicit GkModel(size_t n_obs = 2000, double c = 0.8, double log_lo = -30.0,
                     double log_hi = 30.0);

    std::string name() const override { return "gk"; }
    size_t n_params() const override { return 4; }
    size_t n_summaries() const override { return 4; }
    std::vector<std::string> param_names() const override {
        return {"A", "B", "g", "k"};
    }
    std::vector<bool> log_scale() const override { return {true, true, true, true}; }
    Dataset simulate(const ParameterVector& theta, RandomStream& rng) const override;
    SummaryVector summarize(const Dataset& x) const override;
    double log_prior(const ParameterVector& theta) const override;
    ParameterVector sample_prior(RandomStream& rng) const override;
    void resample_summaries(const Dataset& x, const IndexMatrix& u,
                            const BlockScheme& scheme, Matrix& out) const override;

    size_t n_obs() const { return n_obs_; }
    double c() const { return c_; }

private:
    SummaryVector summaries_from_sorted(const std::vector<double>& sorted) const;

    size_t n_obs_;
    double c_, log_lo_, log_hi_;

    // Multiplicity counts of the frozen index matrix, rebuilt only when a
    // different matrix is seen. Chains are sequential, so no locking.
    mutable const IndexMatrix* cached_u_ = nullptr;
    mutable std::vector<uint16_t> counts_;

    friend struct GkFastPathTestAccess;
};

// ---- Ising: f(x|theta) = exp(theta S(x))/Z on an L x L torus

// Double-counted neighbor statistic: sum_k x_k * (sum of 4 torus neighbors).
long long ising_statistic(const SpinGrid& g);

class IsingModel : public Model {
public:
    explicit IsingModel(int side = 100, int sweeps = 50, double prior_lo = 0.0,
                        double prior_hi = 3.0, int tile = 20);

    std::string name() const override { return "ising"; }
    size_t n_params() const override { return 1; }
    size_t n_summaries() const override { return 1; }
    std::vector<std::string> param_names() const override { return {"theta"}; }
    Dataset simulate(const ParameterVector& theta, RandomStream& rng) const override;
    SummaryVector summarize(const Dataset& x) const override;
    double log_prior(const ParameterVector& theta) const override;
    ParameterVector sample_prior(RandomStream& rng) const override;
    BlockScheme default_scheme() const override {
        return BlockScheme::grid(tile_, tile_);
    }
    void resample_summaries(const Dataset& x, const IndexMatrix& u,
                            const BlockScheme& scheme, Matrix& out) const override;

    // Gibbs sweeps from a given start grid (in place).
    void gibbs_sweeps(SpinGrid& g, double theta, int sweeps, RandomStream& rng) const;

    int side() const { return side_; }
    int sweeps() const { return sweeps_; }
    double prior_lo() const { return lo_; }
    double prior_hi() const { return hi_; }

private:
    int side_, sweeps_, tile_;
    double lo_, hi_;
};

// Exchange-algorithm chain for the Ising posterior: MH on theta with an
// auxiliary simulate(theta') draw; acceptance exp((theta'-theta)(S_obs-S_aux))
// times the prior ratio. The log_lik column records theta * S_obs.
Chain ising_exchange_sampler(const IsingModel& model, long long s_obs,
                             size_t n_iter, double proposal_sd,
                             const ParameterVector& init, RandomStream& rng);

// ---- Lotka-Volterra: Gillespie predator-prey, 9 summary statistics

enum class LvInterpolation { piecewise_constant, linear };

struct LvSettings {
    int x1_0 = 50;               // predators
    int x2_0 = 100;              // prey
    double t_max = 64.0;
    double obs_dt = 2.0;
    size_t n_obs = 32;           // grid t = 0, 2, ..., 62
    long long reaction_cap = 0;  // stop after this many reactions when > 0
    long long max_events = 100000;  // hard safety cap on simulated events
    LvInterpolation interpolation = LvInterpolation::piecewise_constant;
    double prior_lo = -6.0, prior_hi = 2.0;  // on log theta_j
    size_t block = 8;  // time-block length for resampling; must divide n_obs
};

struct LvHazards {
    double prey_birth, interaction, predator_death;
    double total() const { return prey_birth + interaction + predator_death; }
};

// Rates (theta1*X2, theta2*X1*X2, theta3*X1) at a state; theta natural scale.
LvHazards lv_hazards(double x1, double x2, const ParameterVector& theta_natural);

struct LvPathStats {
    long long n_births = 0, n_interactions = 0, n_deaths = 0;
    long long n_events = 0;
    double end_time = 0.0;
    double x1_end = 0.0, x2_end = 0.0;
    bool capped = false;  // hit reaction_cap or max_events before t_max
};

class LotkaVolterraModel : public Model {
public:
    explicit LotkaVolterraModel(LvSettings s = LvSettings{});

    std::string name() const override { return "lv"; }
    size_t n_params() const override { return 3; }
    size_t n_summaries() const override { return 9; }
    std::vector<std::string> param_names() const override {
        return {"theta1", "theta2", "theta3"};
    }
    std::vector<bool> log_scale() const override { return {true, true, true}; }
    Dataset simulate(const ParameterVector& theta, RandomStream& rng) const override;
    SummaryVector summarize(const Dataset& x) const override;
    double log_prior(const ParameterVector& theta) const override;
    ParameterVector sample_prior(RandomStream& rng) const override;
    BlockScheme default_scheme() const override {
        return BlockScheme::time(static_cast<int>(cfg_.block));
    }

    // As simulate(), optionally reporting event counts and the end state.
    Dataset simulate_with_stats(const ParameterVector& theta, RandomStream& rng,
                                LvPathStats* stats) const;

    const LvSettings& settings() const { return cfg_; }

private:
    LvSettings cfg_;
};

// Scaling matrix from n_pilot prior-predictive summary draws (squared MADs).
ScalingMatrix pilot_prior_predictive(const Model& model, size_t n_pilot,
                                     RandomStream& rng);

// Same MAD scaling from summaries simulated at one fixed parameter value.
ScalingMatrix pilot_at_theta(const Model& model, const ParameterVector& theta,
                             size_t n_pilot, RandomStream& rng);

std::unique_ptr<Model> make_model(const std::string& id);

}  // namespace rsabc
