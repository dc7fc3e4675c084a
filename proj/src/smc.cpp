#include "rsabc/smc.hpp"

#include <algorithm>
#include <cmath>

namespace rsabc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log weight increment of one particle when the threshold moves from
// delta_prev to delta, with constants common to every particle dropped.
// d2ref keeps the reference particle's Gaussian exponent at exactly zero so
// tiny probe thresholds stay representable.
double log_weight_shift(KernelKind kind, double d, double d2ref, double delta,
                        double delta_prev, bool first) {
    if (kind == KernelKind::indicator) {
        double now = d < delta ? 0.0 : kNegInf;
        if (first) return now;
        double before = d < delta_prev ? 0.0 : kNegInf;
        return now - before;  // callers skip zero-weight particles
    }
    double t = (d2ref - d * d) / 2.0;  // <= 0 because d2ref is the minimum
    if (t == 0.0) return 0.0;          // reference particle, any threshold
    if (first) return t / (delta * delta);  // -inf when delta^2 underflows
    return t * (1.0 / (delta * delta) - 1.0 / (delta_prev * delta_prev));
}

}  // namespace

std::vector<double> ParticlePopulation::normalized_weights() const {
    double lse = logsumexp(log_weights);
    require(std::isfinite(lse), ErrorCode::degenerate,
            "all particle weights are zero");
    std::vector<double> w(log_weights.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - lse);
    return w;
}

double ess(const std::vector<double>& weights) {
    require(!weights.empty(), ErrorCode::invalid_argument, "empty weight vector");
    double total = 0.0;
    for (double w : weights) {
        require(std::isfinite(w) && w >= 0.0, ErrorCode::invalid_argument,
                "weights must be finite and nonnegative");
        total += w;
    }
    require(total > 0.0, ErrorCode::degenerate, "all weights are zero");
    double sq = 0.0;
    for (double w : weights) {
        double v = w / total;
        sq += v * v;
    }
    return 1.0 / sq;
}

double ess_from_log(const std::vector<double>& log_weights) {
    require(!log_weights.empty(), ErrorCode::invalid_argument,
            "empty weight vector");
    double lse1 = logsumexp(log_weights);
    require(std::isfinite(lse1), ErrorCode::degenerate, "all weights are zero");
    std::vector<double> doubled(log_weights.size());
    for (size_t i = 0; i < doubled.size(); ++i) doubled[i] = 2.0 * log_weights[i];
    return std::exp(2.0 * lse1 - logsumexp(doubled));
}

ReweightResult reweight_solve_delta(const ParticlePopulation& pop, double gamma,
                                    const KernelConfig& kc) {
    size_t n = pop.size();
    require(n >= 1 && pop.distances.size() == n && pop.log_weights.size() == n,
            ErrorCode::invalid_argument, "inconsistent population");
    require(gamma > 0.0 && gamma <= 1.0, ErrorCode::invalid_argument,
            "gamma must lie in (0, 1]");

    bool first = !std::isfinite(pop.delta);
    double d2ref = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (pop.log_weights[i] == kNegInf) continue;
        d2ref = std::min(d2ref, pop.distances[i] * pop.distances[i]);
        dmax = std::max(dmax, pop.distances[i]);
    }
    require(std::isfinite(d2ref), ErrorCode::degenerate,
            "all particle weights are zero");

    double target = gamma * ess_from_log(pop.log_weights);

    std::vector<double> lw(n);
    auto weights_at = [&](double delta) -> const std::vector<double>& {
        for (size_t i = 0; i < n; ++i) {
            double prev = pop.log_weights[i];
            lw[i] = prev == kNegInf
                        ? kNegInf
                        : prev + log_weight_shift(kc.kind, pop.distances[i],
                                                  d2ref, delta, pop.delta, first);
        }
        return lw;
    };
    auto h = [&](double delta) { return ess_from_log(weights_at(delta)) - target; };

    double lo = std::numeric_limits<double>::min();
    double hi = first ? 10.0 * dmax : pop.delta;
    ReweightResult out;
    if (!(hi > lo)) {  // degenerate bracket (all distances zero)
        out.delta = hi;
        out.log_weights = weights_at(hi > 0.0 ? hi : lo);
        out.root_found = false;
        return out;
    }
    double h_hi = h(hi);
    if (h_hi <= 0.0) {
        // ESS at the widest admissible threshold already at or below target
        out.delta = hi;
        out.log_weights = weights_at(hi);
        out.root_found = true;
        return out;
    }
    bool sign_change = h(lo) <= 0.0;  // h increases with delta
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    out.delta = hi;  // upper end keeps ESS >= target side
    out.log_weights = weights_at(out.delta);
    out.root_found = sign_change;
    return out;
}

ParticlePopulation resample_particles(const ParticlePopulation& pop,
                                      double ess_threshold, RandomStream& rng) {
    if (ess_from_log(pop.log_weights) >= ess_threshold) return pop;
    size_t n = pop.size();
    std::vector<double> w = pop.normalized_weights();
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        acc += w[i];
        cdf[i] = acc;
    }
    cdf[n - 1] = 1.0;  // guard against accumulated rounding

    ParticlePopulation out;
    out.delta = pop.delta;
    out.iteration = pop.iteration;
    out.last_move_acceptance = pop.last_move_acceptance;
    out.particles.reserve(n);
    out.summaries.reserve(n);
    out.distances.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        size_t j = static_cast<size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (j >= n) j = n - 1;
        out.particles.push_back(pop.particles[j]);
        out.summaries.push_back(pop.summaries[j]);
        out.distances.push_back(pop.distances[j]);
    }
    out.log_weights.assign(n, -std::log(static_cast<double>(n)));
    return out;
}

double move_step(ParticlePopulation& pop, const Model& model,
                 const KernelConfig& kc, RandomStream& rng) {
    size_t n = pop.size();
    size_t p = model.n_params();
    require(std::isfinite(pop.delta) && pop.delta > 0.0,
            ErrorCode::invalid_argument, "move step needs a finite threshold");

    std::vector<double> w = pop.normalized_weights();
    std::vector<double> mu(p, 0.0), var(p, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < p; ++j) mu[j] += w[i] * pop.particles[i][j];
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < p; ++j) {
            double c = pop.particles[i][j] - mu[j];
            var[j] += w[i] * c * c;
        }
    std::vector<double> sd(p);
    for (size_t j = 0; j < p; ++j)
        sd[j] = std::sqrt(2.0 * std::max(var[j], 1e-12));

    size_t n_s = model.n_summaries();
    size_t attempted = 0, accepted = 0;
    for (size_t i = 0; i < n; ++i) {
        if (pop.log_weights[i] == kNegInf) continue;
        ++attempted;
        ParameterVector prop = pop.particles[i];
        for (size_t j = 0; j < p; ++j) prop[j] += sd[j] * rng.normal();
        double lp_new = model.log_prior(prop);
        if (lp_new == kNegInf) continue;
        Dataset x = model.simulate(prop, rng);
        SummaryVector s = model.summarize(x);
        double d = scaled_distance(s, kc.s_obs, kc.sigma);
        double log_alpha =
            log_kernel_from_distance(kc.kind, d, pop.delta, n_s) + lp_new -
            log_kernel_from_distance(kc.kind, pop.distances[i], pop.delta, n_s) -
            model.log_prior(pop.particles[i]);
        if (std::log(1.0 - rng.uniform()) < log_alpha) {
            pop.particles[i] = std::move(prop);
            pop.summaries[i] = std::move(s);
            pop.distances[i] = d;
            ++accepted;
        }
    }
    double rate = attempted ? static_cast<double>(accepted) /
                                  static_cast<double>(attempted)
                            : 0.0;
    pop.last_move_acceptance = rate;
    return rate;
}

ParticlePopulation run_abc_smc(const Model& model, const SummaryVector& s_obs,
                               const ScalingMatrix& sigma,
                               const SmcSettings& settings, RandomStream& rng,
                               const SmcSnapshotFn& snapshot) {
    size_t n = settings.n_particles;
    require(n >= 2, ErrorCode::invalid_argument, "need at least 2 particles");
    require(settings.gamma > 0.0 && settings.gamma < 1.0,
            ErrorCode::invalid_argument, "gamma must lie in (0, 1)");
    require(settings.stop_rate >= 0.0 && settings.stop_rate <= 1.0,
            ErrorCode::invalid_argument, "stop_rate must lie in [0, 1]");
    require(s_obs.size() == model.n_summaries(), ErrorCode::invalid_argument,
            "observed summary dimension mismatch");
    require(sigma.size() == model.n_summaries(), ErrorCode::invalid_argument,
            "scaling matrix dimension mismatch");
    double ess_threshold = settings.ess_threshold > 0.0
                               ? settings.ess_threshold
                               : static_cast<double>(n) / 2.0;

    KernelConfig kc;
    kc.kind = settings.kernel;
    kc.sigma = sigma;
    kc.s_obs = s_obs;

    ParticlePopulation pop;
    pop.particles.reserve(n);
    pop.summaries.reserve(n);
    pop.distances.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        ParameterVector th = model.sample_prior(rng);
        Dataset x = model.simulate(th, rng);
        SummaryVector s = model.summarize(x);
        pop.distances.push_back(scaled_distance(s, s_obs, sigma));
        pop.particles.push_back(std::move(th));
        pop.summaries.push_back(std::move(s));
    }
    pop.log_weights.assign(n, -std::log(static_cast<double>(n)));

    ParticlePopulation previous = pop;
    size_t consecutive_fallbacks = 0;
    for (size_t l = 1; l <= settings.max_iterations; ++l) {
        ReweightResult rw = reweight_solve_delta(pop, settings.gamma, kc);
        if (rw.root_found) {
            consecutive_fallbacks = 0;
            pop.delta = rw.delta;
            pop.log_weights = std::move(rw.log_weights);
        } else {
            // no root in the bracket: keep the threshold and weights one more
            // iteration; a repeat ends the run
            ++consecutive_fallbacks;
            require(std::isfinite(pop.delta), ErrorCode::degenerate,
                    "threshold adaptation failed at the first iteration");
            if (consecutive_fallbacks >= 2) return pop;
        }
        require(std::isfinite(logsumexp(pop.log_weights)), ErrorCode::degenerate,
                "particle weights degenerated to zero");
        pop.iteration = l;
        pop = resample_particles(pop, ess_threshold, rng);
        double acc = move_step(pop, model, kc, rng);
        if (snapshot) snapshot(pop, acc);
        if (acc < settings.stop_rate) return previous;
        previous = pop;
    }
    return pop;
}

}  // namespace rsabc
