#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rsabc/diagnostics.hpp"
#include "rsabc/models.hpp"
#include "rsabc/samplers.hpp"
#include "rsabc/smc.hpp"

using namespace rsabc;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

Chain tiny_gaussian_chain(uint64_t seed, size_t n_iter, double delta,
                          const char* sampler) {
    GaussianModel model(100);
    RandomStream data_rng(seed, 1);
    Dataset obs = model.simulate({0.0}, data_rng);
    SummaryVector s = model.summarize(obs);
    ScalingMatrix sigma = ScalingMatrix::identity(1);
    AdaptiveProposal prop({0.01}, 200);
    RandomStream rng(seed, 10);
    if (sampler == std::string("pm"))
        return run_pm_abc_mcmc(model, s, 20, delta, sigma, n_iter, {0.0}, prop,
                               rng);
    if (sampler == std::string("rs"))
        return run_rs_abc_mcmc(model, s, 100, 100, default_strata(delta),
                               delta, sigma, n_iter, {0.0}, prop, rng);
    return run_xrs_abc_mcmc(model, s, 100, 100, default_strata(delta), delta,
                            sigma, n_iter, {0.0}, prop, rng);
}
}  // namespace

TEST_CASE("metropolis acceptance follows the likelihood ratio") {
    RandomStream rng(2, 1);
    const int n = 40000;
    int acc = 0;
    for (int i = 0; i < n; ++i)
        acc += mh_accept(0.5, 1.0, 1.0, 1.0, 1.0, rng);
    CHECK(acc / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.03));
    CHECK(mh_accept(2.0, 1.0, 1.0, 1.0, 1.0, rng));  // ratio > 1 always moves
    CHECK(!mh_accept(0.0, 1.0, 1.0, 1.0, 1.0, rng));

    acc = 0;
    for (int i = 0; i < n; ++i)
        acc += mh_accept_log(std::log(0.5), 0.0, 0.0, 0.0, 0.0, rng);
    CHECK(acc / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.03));
    CHECK(!mh_accept_log(-kInf, 0.0, 0.0, 0.0, 0.0, rng));
    CHECK(mh_accept_log(1.0, 0.0, 0.0, 0.0, 0.0, rng));
}

TEST_CASE("adaptive proposal covariance refresh oracle") {
    AdaptiveProposal p({1.0}, 4);
    CHECK(p.covariance()[0] == doctest::Approx(1.0));
    p.record({1.0});
    p.record({2.0});
    p.record({3.0});
    CHECK(p.covariance()[0] == doctest::Approx(1.0));  // not yet refreshed
    p.record({4.0});
    // Haario scaling (2.38^2 / p) of the sample covariance plus jitter
    double expect = 2.38 * 2.38 * (5.0 / 3.0) + 1e-10;
    CHECK(p.covariance()[0] == doctest::Approx(expect).epsilon(1e-12));

    AdaptiveProposal frozen({1.0}, 4, false);
    for (int i = 0; i < 20; ++i) frozen.record({static_cast<double>(i)});
    CHECK(frozen.covariance()[0] == doctest::Approx(1.0));
}

TEST_CASE("proposal handoff requires a valid covariance") {
    AdaptiveProposal p({1.0, 1.0}, 100);
    p.set_covariance({2.0, 0.1, 0.1, 3.0});
    CHECK(p.covariance()[0] == doctest::Approx(2.0));
    CHECK_THROWS_AS(p.set_covariance({1.0, 2.0, 2.0, 1.0}), Error);  // not SPD
    CHECK_THROWS_AS(p.set_covariance({1.0, 2.0}), Error);  // wrong shape
}

TEST_CASE("proposal draws are deterministic given the stream") {
    AdaptiveProposal p({0.25, 4.0}, 100);
    RandomStream r1(7, 3), r2(7, 3);
    ParameterVector a = p.propose({1.0, -1.0}, r1);
    ParameterVector b = p.propose({1.0, -1.0}, r2);
    CHECK(a == b);
}

TEST_CASE("threshold initialization picks the psi percentile") {
    std::vector<double> d;
    for (int i = 100; i >= 1; --i) d.push_back(i);
    CHECK(tune_initial_delta(d, 5.0) == doctest::Approx(5.0));
    CHECK(tune_initial_delta(d, 100.0) == doctest::Approx(100.0));
}

TEST_CASE("threshold reduction needs acceptance and 5 percent mass below") {
    ThresholdSchedule s;
    s.delta = 1.0;
    std::vector<double> mostly_above(100, 2.0);
    for (int i = 0; i < 4; ++i) mostly_above[i] = 0.5;  // 4% below delta

    ThresholdSchedule r1 = maybe_reduce_delta(s, false, mostly_above, 5.0);
    CHECK(r1.delta == 1.0);  // rejection leaves the schedule untouched

    ThresholdSchedule r2 = maybe_reduce_delta(s, true, mostly_above, 5.0);
    CHECK(r2.delta == 1.0);  // accepted but below-threshold mass too small
    CHECK(!r2.pending);

    std::vector<double> enough_below(100, 2.0);
    for (int i = 0; i < 10; ++i) enough_below[i] = 0.2 + 0.01 * i;
    ThresholdSchedule r3 = maybe_reduce_delta(s, true, enough_below, 5.0);
    CHECK(r3.delta == doctest::Approx(0.24));  // 5th of 100 sorted values
    CHECK(r3.delta <= s.delta);

    // d_psi above the current delta never raises it
    ThresholdSchedule small;
    small.delta = 0.1;
    ThresholdSchedule r4 = maybe_reduce_delta(small, true, enough_below, 5.0);
    CHECK(r4.delta == 0.1);
}

TEST_CASE("pm sampler output contract and determinism") {
    Chain c1 = tiny_gaussian_chain(5, 300, 0.05, "pm");
    Chain c2 = tiny_gaussian_chain(5, 300, 0.05, "pm");
    REQUIRE(c1.size() == 300);
    CHECK(c1.param_names == std::vector<std::string>{"theta"});
    CHECK(c1.log_scale == std::vector<bool>{false});
    CHECK(c1.acceptance_rate > 0.0);
    CHECK(c1.acceptance_rate < 1.0);
    CHECK(c1.final_delta == 0.05);
    CHECK(c1.final_theta == c1.rows.back().theta);
    for (size_t i = 0; i < c1.size(); ++i) {
        CHECK(c1.rows[i].theta == c2.rows[i].theta);  // bitwise reproducible
        CHECK(c1.rows[i].log_lik == c2.rows[i].log_lik);
        CHECK(c1.rows[i].delta == 0.05);
    }
}

TEST_CASE("stratified samplers record strata occupancy") {
    Chain c = tiny_gaussian_chain(6, 200, 0.05, "rs");
    REQUIRE(c.size() == 200);
    bool saw = false;
    for (const ChainRow& r : c.rows) {
        if (r.strata_n.empty()) continue;
        saw = true;
        CHECK(r.strata_n.size() == 3);
        size_t total = 0;
        for (size_t n : r.strata_n) {
            CHECK(n > 0);  // retained states never neglect a stratum
            total += n;
        }
        CHECK(total == 100);
    }
    CHECK(saw);

    Chain cx = tiny_gaussian_chain(6, 200, 0.05, "xrs");
    CHECK(cx.size() == 200);
    CHECK(cx.acceptance_rate > 0.0);
}

TEST_CASE("self-tuned threshold trace is non-increasing") {
    GaussianModel model(100);
    RandomStream data_rng(11, 1);
    Dataset obs = model.simulate({0.0}, data_rng);
    SummaryVector s = model.summarize(obs);
    AdaptiveProposal prop({0.01}, 200);
    RandomStream rng(11, 10);
    ThresholdSchedule schedule;  // delta = 0 requests tuning
    schedule.psi = 5.0;
    Chain c = run_r_abc_mcmc(model, s, 100, schedule,
                             ScalingMatrix::identity(1), 600, 100, {0.0}, prop,
                             rng);
    REQUIRE(c.size() == 600);
    REQUIRE(!c.delta_history.empty());
    CHECK(c.final_delta > 0.0);
    CHECK(c.final_delta == c.delta_history.back());
    CHECK(c.final_sigma.size() == 1);  // refreshed from burn-in summaries
    // The scaling refresh at k_burnin+1 restarts the threshold on the new
    // distance scale; from then on the per-row trace is non-increasing.
    for (size_t t = 101; t < c.rows.size(); ++t)
        CHECK(c.rows[t].delta <= c.rows[t - 1].delta);

    // without a scaling refresh the whole trace is non-increasing
    ThresholdSchedule sched0;
    sched0.psi = 5.0;
    AdaptiveProposal prop0({0.01}, 200);
    RandomStream rng0(11, 10);
    Chain c0 = run_r_abc_mcmc(model, s, 100, sched0,
                              ScalingMatrix::identity(1), 600, 0, {0.0}, prop0,
                              rng0);
    REQUIRE(!c0.delta_history.empty());
    for (size_t i = 1; i < c0.delta_history.size(); ++i)
        CHECK(c0.delta_history[i] <= c0.delta_history[i - 1]);
    CHECK(c0.final_delta <= c0.delta_history.front());

    // frozen schedule keeps the initial threshold for the whole run
    ThresholdSchedule fixed;
    fixed.delta = 0.05;
    fixed.tune = false;
    AdaptiveProposal prop2({0.01}, 200);
    RandomStream rng2(11, 10);
    Chain cf = run_r_abc_mcmc(model, s, 100, fixed,
                              ScalingMatrix::identity(1), 300, 0, {0.0}, prop2,
                              rng2);
    for (const ChainRow& r : cf.rows) CHECK(r.delta == 0.05);
}

TEST_CASE("sampler startup rejects unusable initial states") {
    IsingModel model(10, 5, 0.0, 3.0, 5);
    RandomStream data_rng(3, 1);
    Dataset obs = model.simulate({0.3}, data_rng);
    SummaryVector s = model.summarize(obs);
    AdaptiveProposal prop({0.01}, 100);
    RandomStream rng(3, 10);
    CHECK_THROWS_AS(run_pm_abc_mcmc(model, s, 2, 6.0,
                                    ScalingMatrix::identity(1), 50, {5.0},
                                    prop, rng),
                    Error);  // init outside the prior support
}

TEST_CASE("effective sample size of weight vectors") {
    CHECK(ess({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(4.0));
    CHECK(ess({1.0, 0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(ess({2.0, 2.0}) == doctest::Approx(2.0));  // unnormalized input
    std::vector<double> lw = {std::log(0.1), std::log(0.3), std::log(0.6)};
    CHECK(ess_from_log(lw) == doctest::Approx(ess({0.1, 0.3, 0.6})));
    CHECK(ess_from_log({-kInf, 0.0, 0.0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(ess({0.0, 0.0}), Error);
    CHECK_THROWS_AS(ess({-1.0, 2.0}), Error);
}

namespace {
ParticlePopulation make_population(size_t n, uint64_t seed, double delta) {
    ParticlePopulation pop;
    RandomStream rng(seed, 1);
    for (size_t i = 0; i < n; ++i) {
        pop.particles.push_back({rng.normal()});
        pop.summaries.push_back({rng.normal()});
        pop.distances.push_back(std::abs(rng.normal()) + 0.01);
        pop.log_weights.push_back(-std::log(static_cast<double>(n)));
    }
    pop.delta = delta;
    return pop;
}
}  // namespace

TEST_CASE("reweight solves the ess decay equation") {
    ParticlePopulation pop = make_population(200, 4, 2.0);
    KernelConfig kc;
    kc.kind = KernelKind::gaussian;
    ReweightResult r = reweight_solve_delta(pop, 0.9, kc);
    REQUIRE(r.root_found);
    CHECK(r.delta < pop.delta);
    CHECK(r.delta > 0.0);
    double target = 0.9 * ess_from_log(pop.log_weights);
    CHECK(ess_from_log(r.log_weights) ==
          doctest::Approx(target).epsilon(1e-6));
}

TEST_CASE("reweight at an unchanged threshold keeps weights bit-identical") {
    ParticlePopulation pop = make_population(64, 9, 1.5);
    KernelConfig kc;
    ReweightResult r = reweight_solve_delta(pop, 1.0, kc);
    // gamma = 1: the current delta already satisfies the equation
    REQUIRE(r.root_found);
    CHECK(r.delta == doctest::Approx(pop.delta).epsilon(1e-9));
}

TEST_CASE("multinomial resampling triggers on low ess only") {
    ParticlePopulation pop = make_population(50, 6, 1.0);
    // concentrate almost all mass on particle 7
    for (size_t i = 0; i < pop.size(); ++i)
        pop.log_weights[i] = i == 7 ? 0.0 : -40.0;
    RandomStream rng(6, 2);
    ParticlePopulation res = resample_particles(pop, 25.0, rng);
    REQUIRE(res.size() == pop.size());
    int from7 = 0;
    for (size_t i = 0; i < res.size(); ++i) {
        CHECK(res.log_weights[i] == doctest::Approx(-std::log(50.0)));
        from7 += res.particles[i][0] == pop.particles[7][0];
    }
    CHECK(from7 == 50);

    // high ess: identity pass-through, bit-identical
    ParticlePopulation uniform = make_population(50, 6, 1.0);
    ParticlePopulation same = resample_particles(uniform, 25.0, rng);
    CHECK(same.particles == uniform.particles);
    CHECK(same.log_weights == uniform.log_weights);
}

TEST_CASE("smc driver on the gaussian toy") {
    GaussianModel model(100);
    RandomStream data_rng(13, 1);
    Dataset obs = model.simulate({0.0}, data_rng);
    SummaryVector s = model.summarize(obs);
    SmcSettings settings;
    settings.n_particles = 128;
    settings.gamma = 0.9;
    settings.stop_rate = 0.05;
    settings.max_iterations = 60;
    RandomStream rng(13, 10);
    std::vector<double> deltas;
    ParticlePopulation pop = run_abc_smc(
        model, s, ScalingMatrix::identity(1), settings, rng,
        [&](const ParticlePopulation& p, double) { deltas.push_back(p.delta); });
    REQUIRE(pop.size() == 128);
    REQUIRE(deltas.size() >= 2);
    for (size_t i = 1; i < deltas.size(); ++i) CHECK(deltas[i] <= deltas[i - 1]);
    CHECK(std::isfinite(pop.delta));
    CHECK(pop.delta > 0.0);
    std::vector<double> w = pop.normalized_weights();
    double mean_theta = 0.0;
    for (size_t i = 0; i < pop.size(); ++i) mean_theta += w[i] * pop.particles[i][0];
    // posterior concentrates near the conjugate mean at small delta
    auto [post_mean, post_sd] = gaussian_exact_posterior(0.1, 0.2, s[0], 100);
    CHECK(std::abs(mean_theta - post_mean) < 4.0 * post_sd);
}

TEST_CASE("iat of white noise is near one") {
    RandomStream rng(3, 1);
    std::vector<double> x(20000);
    for (auto& v : x) v = rng.normal();
    CHECK(iat(x) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("iat of an ar1 chain matches theory") {
    // tau = (1 + rho) / (1 - rho) = 3 at rho = 0.5
    RandomStream rng(4, 1);
    std::vector<double> x(200000);
    double prev = 0.0;
    for (auto& v : x) {
        prev = 0.5 * prev + std::sqrt(1.0 - 0.25) * rng.normal();
        v = prev;
    }
    CHECK(iat(x) == doctest::Approx(3.0).epsilon(0.10));
    CHECK(ess_from_iat(x.size(), iat(x)) ==
          doctest::Approx(x.size() / iat(x)));
}

TEST_CASE("iat degenerate inputs") {
    CHECK_THROWS_AS(iat({1.0, 2.0}), Error);  // too short
    std::vector<double> flat(100, 3.0);
    CHECK_THROWS_AS(iat(flat), Error);  // zero variance
    CHECK(ess_from_iat(1000, 2.5) == doctest::Approx(400.0));
    CHECK_THROWS_AS(ess_from_iat(1000, 0.5), Error);
}

TEST_CASE("wasserstein distance on sorted samples") {
    CHECK(wasserstein_1d({0.0, 1.0}, {1.0, 2.0}) == doctest::Approx(1.0));
    CHECK(wasserstein_1d({5.0, 1.0, 3.0}, {3.0, 1.0, 5.0}) ==
          doctest::Approx(0.0));
    CHECK(wasserstein_1d({0.0, 1.0}, {0.0, 0.5, 1.0}) ==
          doctest::Approx(1.0 / 6.0));
    // symmetry and triangle inequality on three fixed samples
    std::vector<double> a = {0.0, 0.2, 0.9}, b = {0.1, 0.4, 1.2},
                        c = {-0.5, 0.3, 0.8};
    CHECK(wasserstein_1d(a, b) == doctest::Approx(wasserstein_1d(b, a)));
    CHECK(wasserstein_1d(a, c) <=
          wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-12);
    CHECK_THROWS_AS(wasserstein_1d({}, {1.0}), Error);
}

TEST_CASE("posterior summary nearest rank bounds") {
    std::vector<double> draws;
    for (int i = 1000; i >= 1; --i) draws.push_back(i);
    PosteriorSummary s = posterior_summary(draws);
    CHECK(s.mean == doctest::Approx(500.5));
    CHECK(s.lower == doctest::Approx(25.0));
    CHECK(s.upper == doctest::Approx(976.0));
    CHECK_THROWS_AS(posterior_summary({1.0, 2.0}), Error);
}

TEST_CASE("chain diagnostics handle stuck coordinates") {
    Chain chain;
    chain.param_names = {"a", "b"};
    chain.log_scale = {false, false};
    RandomStream rng(8, 1);
    for (int i = 0; i < 500; ++i) {
        ChainRow r;
        r.theta = {rng.normal(), 2.0};  // second coordinate constant
        r.accepted = true;
        chain.rows.push_back(r);
    }
    chain.acceptance_rate = 1.0;
    chain.wall_seconds = 1.0;
    ChainDiagnostics d = diagnose_chain(chain, 100);
    REQUIRE(d.iat_per_coordinate.size() == 2);
    CHECK(d.iat_per_coordinate[1] == doctest::Approx(400.0));  // stuck: n
    CHECK(d.ess_per_coordinate[1] == doctest::Approx(1.0));
    CHECK(d.worst_ess == doctest::Approx(1.0));
    CHECK(d.ess_per_minute == doctest::Approx(60.0 * d.worst_ess));
}
