#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rsabc/models.hpp"

using namespace rsabc;

TEST_CASE("gaussian conjugate posterior oracle") {
    auto [mean, sd] = gaussian_exact_posterior(0.1, 0.2, -0.0012, 1000);
    CHECK(mean == doctest::Approx(0.0012682926829268293).epsilon(1e-15));
    CHECK(sd == doctest::Approx(0.031234752377721213).epsilon(1e-15));
    // flat-ish prior: posterior hugs the data mean
    auto [m2, s2] = gaussian_exact_posterior(0.0, 100.0, 1.7, 400);
    CHECK(m2 == doctest::Approx(1.7).epsilon(1e-5));
    CHECK(s2 == doctest::Approx(0.05).epsilon(1e-4));
}

TEST_CASE("gaussian summary log likelihood oracle") {
    CHECK(gaussian_exact_summary_loglik(0.3, 0.3, 100) ==
          doctest::Approx(1.383646559789373).epsilon(1e-14));
    CHECK(gaussian_exact_summary_loglik(0.1, 0.3, 100) ==
          doctest::Approx(-0.61635344021062699).epsilon(1e-14));
    // maximized exactly at theta = s
    double at_s = gaussian_exact_summary_loglik(0.5, 0.5, 50);
    CHECK(gaussian_exact_summary_loglik(0.4, 0.5, 50) < at_s);
    CHECK(gaussian_exact_summary_loglik(0.6, 0.5, 50) < at_s);
}

TEST_CASE("gaussian model simulate and summarize") {
    GaussianModel model(4000);
    RandomStream rng(31, 1);
    Dataset d = model.simulate({1.5}, rng);
    const auto& s = std::get<ScalarSample>(d);
    REQUIRE(s.values.size() == 4000);
    SummaryVector sum = model.summarize(d);
    REQUIRE(sum.size() == 1);
    CHECK(sum[0] == doctest::Approx(mean(s.values)).epsilon(1e-15));
    CHECK(sum[0] == doctest::Approx(1.5).epsilon(0.05));
    CHECK(model.log_prior({0.1}) > model.log_prior({0.9}));
    CHECK(std::isfinite(model.log_prior({5.0})));  // gaussian prior: full support
}

TEST_CASE("g-and-k quantile function oracles") {
    CHECK(gk_from_normal(0.0, 7.0, 2.0, 0.8, 1.3, 0.5) == doctest::Approx(7.0));
    CHECK(gk_from_normal(1.5, 2.0, 3.0, 0.8, 0.0, 0.0) == doctest::Approx(6.5));
    CHECK(gk_from_normal(1.0, 3.0, 1.0, 0.8, 2.0, 0.5) ==
          doctest::Approx(5.2758589898744814).epsilon(1e-14));
    CHECK(gk_from_normal(-1.5, 0.0, 2.0, 0.8, 1.0, 0.2) ==
          doctest::Approx(-1.8679181036341661).epsilon(1e-14));
    CHECK(gk_quantile(0.5, 4.0, 1.0, 0.8, 0.7, 0.2) == doctest::Approx(4.0));
    // strictly increasing in z (valid c, g, k)
    double prev = gk_quantile(0.01, 3.0, 1.0, 0.8, 2.0, 0.5);
    for (double z = 0.05; z < 1.0; z += 0.05) {
        double q = gk_quantile(z, 3.0, 1.0, 0.8, 2.0, 0.5);
        CHECK(q > prev);
        prev = q;
    }
    CHECK_THROWS_AS(gk_from_normal(0.0, 0.0, 0.0, 0.8, 0.0, 0.0), Error);
    CHECK_THROWS_AS(gk_from_normal(0.0, 0.0, 1.0, 0.8, 0.0, -0.5), Error);
}

TEST_CASE("g-and-k octile summaries") {
    // n = 8, values 1..8: octile ranks pick 1..7 exactly
    ScalarSample s;
    for (int i = 8; i >= 1; --i) s.values.push_back(i);
    GkModel model(8);
    SummaryVector sum = model.summarize(Dataset{s});
    REQUIRE(sum.size() == 4);
    CHECK(sum[0] == doctest::Approx(4.0));   // median
    CHECK(sum[1] == doctest::Approx(4.0));   // interquartile spread
    CHECK(sum[2] == doctest::Approx(0.0));   // skew
    CHECK(sum[3] == doctest::Approx(1.0));   // tails: (7-5+3-1)/4
    // location/scale equivariance of the first two, invariance of the rest
    ScalarSample t;
    for (double v : s.values) t.values.push_back(10.0 + 2.0 * v);
    SummaryVector sum2 = model.summarize(Dataset{t});
    CHECK(sum2[0] == doctest::Approx(10.0 + 2.0 * sum[0]));
    CHECK(sum2[1] == doctest::Approx(2.0 * sum[1]));
    CHECK(sum2[2] == doctest::Approx(sum[2]));
    CHECK(sum2[3] == doctest::Approx(sum[3]));
}

TEST_CASE("g-and-k simulation matches the quantile transform") {
    // theta on the log scale; recovered medians sit near A
    GkModel model(5000);
    RandomStream rng(5, 1);
    ParameterVector theta = {std::log(3.0), std::log(1.0), std::log(2.0),
                             std::log(0.5)};
    Dataset d = model.simulate(theta, rng);
    SummaryVector sum = model.summarize(d);
    CHECK(sum[0] == doctest::Approx(3.0).epsilon(0.05));
    CHECK(sum[1] > 0.0);
    CHECK(model.log_prior(theta) == doctest::Approx(model.log_prior(
              {0.0, 0.0, 0.0, 0.0})));  // flat inside the box
    CHECK(model.log_prior({40.0, 0.0, 0.0, 0.0}) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("ising statistic on hand grids") {
    SpinGrid g;
    g.side = 4;
    g.spins.assign(16, 1);
    CHECK(ising_statistic(g) == 64);  // 32 torus edges, double counted
    g.spins[5] = -1;                  // one flip cuts 4 edges twice over
    CHECK(ising_statistic(g) == 48);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) g.spins[r * 4 + c] = ((r + c) % 2) ? 1 : -1;
    CHECK(ising_statistic(g) == -64);  // checkerboard: every edge disagrees
    g.spins[0] = 3;
    CHECK_THROWS_AS(ising_statistic(g), Error);
}

TEST_CASE("ising model simulation behaviour") {
    IsingModel model(16, 30, 0.0, 3.0, 4);
    RandomStream rng(9, 1);
    Dataset cold = model.simulate({0.0}, rng);
    const auto& grid = std::get<SpinGrid>(cold);
    REQUIRE(grid.side == 16);
    REQUIRE(grid.spins.size() == 256);
    // theta = 0: spins stay independent uniform, correlation near zero
    double s0 = model.summarize(cold)[0];
    CHECK(std::abs(s0) < 0.25 * 2.0 * 2.0 * 16.0 * 16.0);
    // strong coupling orders the grid far beyond the independent case
    double s_hot = 0.0, s_cold = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        s_cold += model.summarize(model.simulate({0.0}, rng))[0];
        s_hot += model.summarize(model.simulate({2.0}, rng))[0];
    }
    CHECK(s_hot / 5.0 > s_cold / 5.0 + 100.0);
    CHECK(model.log_prior({3.5}) ==
          -std::numeric_limits<double>::infinity());
    CHECK(model.log_prior({1.0}) == doctest::Approx(-std::log(3.0)));
}

TEST_CASE("lv hazards oracle") {
    LvHazards h = lv_hazards(50.0, 100.0, {1.0, 0.005, 0.6});
    CHECK(h.prey_birth == doctest::Approx(100.0));
    CHECK(h.interaction == doctest::Approx(25.0));
    CHECK(h.predator_death == doctest::Approx(30.0));
    CHECK(h.total() == doctest::Approx(155.0));
    CHECK_THROWS_AS(lv_hazards(1.0, 1.0, {1.0, 2.0}), Error);
}

TEST_CASE("lv pure birth keeps predators frozen") {
    LvSettings cfg;
    cfg.x1_0 = 50;
    cfg.x2_0 = 100;
    cfg.t_max = 16.0;
    cfg.obs_dt = 2.0;
    cfg.n_obs = 8;
    cfg.block = 8;
    LotkaVolterraModel model(cfg);
    RandomStream rng(14, 1);
    // sampling scale: interaction and death rates effectively zero
    LvPathStats st;
    Dataset d =
        model.simulate_with_stats({std::log(0.3), -300.0, -300.0}, rng, &st);
    const auto& series = std::get<BivariateSeries>(d);
    REQUIRE(series.x1.size() == 8);
    CHECK(st.n_interactions == 0);
    CHECK(st.n_deaths == 0);
    CHECK(st.n_births > 0);
    CHECK(st.x1_end == doctest::Approx(50.0));
    CHECK(st.x2_end == doctest::Approx(100.0 + st.n_births));
    for (double v : series.x1) CHECK(v == doctest::Approx(50.0));
    for (size_t i = 1; i < series.x2.size(); ++i)
        CHECK(series.x2[i] >= series.x2[i - 1]);
}

TEST_CASE("lv event accounting balances the end state") {
    LotkaVolterraModel model;
    RandomStream rng(21, 1);
    ParameterVector theta = {0.0, std::log(0.005), std::log(0.6)};
    LvPathStats st;
    model.simulate_with_stats(theta, rng, &st);
    CHECK(st.n_events == st.n_births + st.n_interactions + st.n_deaths);
    CHECK(st.x2_end == doctest::Approx(100.0 + st.n_births - st.n_interactions));
    CHECK(st.x1_end == doctest::Approx(50.0 + st.n_interactions - st.n_deaths));
    CHECK(st.end_time <= model.settings().t_max);
    CHECK(!st.capped);
}

TEST_CASE("lv reaction cap freezes the path") {
    LvSettings cfg;
    cfg.reaction_cap = 25;
    LotkaVolterraModel model(cfg);
    RandomStream rng(22, 1);
    LvPathStats st;
    model.simulate_with_stats({0.0, std::log(0.005), std::log(0.6)}, rng, &st);
    CHECK(st.capped);
    CHECK(st.n_events == 25);

    LvSettings tight;
    tight.max_events = 10;
    LotkaVolterraModel model2(tight);
    RandomStream rng2(22, 1);
    LvPathStats st2;
    model2.simulate_with_stats({0.0, std::log(0.005), std::log(0.6)}, rng2, &st2);
    CHECK(st2.capped);
    CHECK(st2.n_events == 10);
}

TEST_CASE("lv interpolation modes differ between events") {
    LvSettings lin;
    lin.interpolation = LvInterpolation::linear;
    LotkaVolterraModel model_pc;  // piecewise constant default
    LotkaVolterraModel model_lin(lin);
    ParameterVector theta = {0.0, std::log(0.005), std::log(0.6)};
    RandomStream r1(33, 1), r2(33, 1);
    Dataset d_pc = model_pc.simulate(theta, r1);
    Dataset d_li = model_lin.simulate(theta, r2);
    const auto& pc = std::get<BivariateSeries>(d_pc);
    const auto& li = std::get<BivariateSeries>(d_li);
    // same event stream, same grid; constant sampling gives whole numbers
    bool integral_pc = true, fractional_li = false;
    for (double v : pc.x1) integral_pc = integral_pc && v == std::floor(v);
    for (double v : li.x1) fractional_li = fractional_li || v != std::floor(v);
    CHECK(integral_pc);
    CHECK(fractional_li);
    CHECK(pc.x1[0] == doctest::Approx(li.x1[0]));  // t = 0 preserves the start
}

TEST_CASE("lv summaries have nine components") {
    LotkaVolterraModel model;
    RandomStream rng(41, 1);
    Dataset d = model.simulate({0.0, std::log(0.005), std::log(0.6)}, rng);
    SummaryVector s = model.summarize(d);
    REQUIRE(s.size() == 9);
    for (double v : s) CHECK(std::isfinite(v));
    CHECK(model.log_scale() == std::vector<bool>{true, true, true});
    ParameterVector nat = model.natural({0.0, std::log(0.005), std::log(0.6)});
    CHECK(nat[0] == doctest::Approx(1.0));
    CHECK(nat[1] == doctest::Approx(0.005));
    CHECK(nat[2] == doctest::Approx(0.6));
    ParameterVector back = model.sampling_from_natural(nat);
    CHECK(back[1] == doctest::Approx(std::log(0.005)));
}

namespace {
void check_fast_path(const Model& model, const Dataset& x,
                     const BlockScheme& scheme, uint64_t seed) {
    RandomStream rng(seed, 1);
    IndexMatrix u = make_index_matrix(24, scheme, x, rng);
    Matrix fast(u.rows, model.n_summaries());
    model.resample_summaries(x, u, scheme, fast);
    for (size_t r = 0; r < u.rows; ++r) {
        SummaryVector slow = model.summarize(resample_dataset(x, u, r, scheme));
        for (size_t j = 0; j < slow.size(); ++j)
            CHECK(fast(r, j) == slow[j]);  // bitwise identical decomposition
    }
}
}  // namespace

TEST_CASE("fast resample summaries match gather and summarize bitwise") {
    RandomStream rng(55, 1);

    GaussianModel gauss(96);
    Dataset gd = gauss.simulate({0.4}, rng);
    check_fast_path(gauss, gd, gauss.default_scheme(), 101);

    GkModel gk(64);
    Dataset kd = gk.simulate({std::log(3.0), 0.0, std::log(2.0), std::log(0.5)},
                             rng);
    check_fast_path(gk, kd, gk.default_scheme(), 102);

    IsingModel ising(12, 10, 0.0, 3.0, 4);
    Dataset id = ising.simulate({0.4}, rng);
    check_fast_path(ising, id, ising.default_scheme(), 103);

    LvSettings cfg;
    cfg.block = 8;
    LotkaVolterraModel lv(cfg);
    Dataset ld = lv.simulate({0.0, std::log(0.005), std::log(0.6)}, rng);
    check_fast_path(lv, ld, lv.default_scheme(), 104);
    // time blocks of a different length than the model default
    check_fast_path(lv, ld, BlockScheme::time(4), 105);
    check_fast_path(lv, ld, BlockScheme::time(4, true), 106);
}

TEST_CASE("pilot scaling matrices are positive") {
    GaussianModel model(200);
    RandomStream rng(61, 1);
    ScalingMatrix prior_scale = pilot_prior_predictive(model, 50, rng);
    REQUIRE(prior_scale.size() == 1);
    CHECK(prior_scale.diag[0] > 0.0);
    ScalingMatrix at_theta = pilot_at_theta(model, {0.0}, 50, rng);
    REQUIRE(at_theta.size() == 1);
    CHECK(at_theta.diag[0] > 0.0);
    // pilot at a single theta is tighter than across the whole prior
    CHECK(at_theta.diag[0] < prior_scale.diag[0]);
}

TEST_CASE("model factory ids") {
    CHECK(make_model("gaussian")->name() == "gaussian");
    CHECK(make_model("gk")->name() == "gk");
    CHECK(make_model("ising")->name() == "ising");
    CHECK(make_model("lv")->name() == "lv");
    CHECK(make_model("lv")->n_summaries() == 9);
    CHECK_THROWS_AS(make_model("weibull"), Error);
}
