#include "rsabc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rsabc/resampling.hpp"
#include "rsabc/samplers.hpp"
#include "rsabc/stats.hpp"
#include "rsabc/version.hpp"

namespace rsabc {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stream ids carved out of the master seed; every consumer gets its own.
constexpr uint64_t kStreamData = 1;
constexpr uint64_t kStreamPilot = 2;
constexpr uint64_t kStreamInit = 3;
constexpr uint64_t kStreamSweepShape = 20;
constexpr uint64_t kStreamSweep = 21;
constexpr uint64_t kStreamStageBase = 10;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// JSON has no inf/nan literals; fall back to strings for those.
ordered_json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::io, "cannot write " + path);
    out << text;
    require(out.good(), ErrorCode::io, "write failed: " + path);
}

std::string resolve_observed_path(const ExperimentConfig& cfg) {
    fs::path p(cfg.observed_path);
    if (p.is_absolute() || cfg.config_dir.empty()) return p.string();
    return (fs::path(cfg.config_dir) / p).string();
}

Dataset load_observed(const ExperimentConfig& cfg, const Model& model) {
    if (!cfg.observed_path.empty()) {
        std::string path = resolve_observed_path(cfg);
        if (cfg.model == "ising") return load_spin_grid(path);
        if (cfg.model == "lv") return load_bivariate_series(path);
        return load_scalar_sample(path);
    }
    RandomStream rng(cfg.seed, kStreamData);
    require(model.log_prior(cfg.theta_true) > kNegInf, ErrorCode::config,
            "'theta_true' lies outside the prior support");
    return model.simulate(cfg.theta_true, rng);
}

ScalingMatrix resolve_sigma(const ExperimentConfig& cfg, const Model& model,
                            const ParameterVector& init) {
    switch (cfg.sigma.mode) {
        case SigmaMode::identity:
            return ScalingMatrix::identity(model.n_summaries());
        case SigmaMode::fixed:
            return ScalingMatrix(cfg.sigma.values);
        case SigmaMode::pilot_prior: {
            RandomStream rng(cfg.seed, kStreamPilot);
            return pilot_prior_predictive(model, cfg.sigma.n_pilot, rng);
        }
        case SigmaMode::pilot_at_init: {
            RandomStream rng(cfg.seed, kStreamPilot);
            return pilot_at_theta(model, init, cfg.sigma.n_pilot, rng);
        }
    }
    return ScalingMatrix::identity(model.n_summaries());
}

std::vector<double> proposal_variances(const ProposalConfig& pc, size_t p) {
    std::vector<double> sd = pc.sd;
    if (sd.empty()) sd.assign(p, 0.1);
    if (sd.size() == 1) sd.assign(p, sd[0]);
    require(sd.size() == p, ErrorCode::config, "proposal sd dimension mismatch");
    std::vector<double> var(p);
    for (size_t i = 0; i < p; ++i) var[i] = sd[i] * sd[i];
    return var;
}

AdaptiveProposal build_proposal(const ExperimentConfig& cfg,
                                const StageConfig& stage, size_t p) {
    const ProposalConfig& pc = stage.proposal_given ? stage.proposal
                                                    : cfg.proposal;
    return AdaptiveProposal(proposal_variances(pc, p), pc.refresh, pc.adapt);
}

std::string chain_header(const Chain& chain) {
    std::string h = "# iter";
    for (const std::string& n : chain.param_names) h += " " + n;
    h += " log_lik accepted delta\n";
    return h;
}

void write_chain_file(const Chain& chain, const std::string& path) {
    std::ostringstream out;
    out << chain_header(chain);
    for (size_t i = 0; i < chain.rows.size(); ++i) {
        const ChainRow& r = chain.rows[i];
        out << (i + 1);
        for (double v : r.theta) out << ' ' << fmt(v);
        out << ' ' << fmt(r.log_lik) << ' ' << (r.accepted ? 1 : 0) << ' '
            << fmt(r.delta) << '\n';
    }
    write_text(path, out.str());
}

void write_threshold_trace(const Chain& chain, const std::string& path) {
    std::ostringstream out;
    out << "# step delta\n";
    if (chain.delta_history.empty()) {
        out << "0 " << fmt(chain.final_delta) << '\n';
    } else {
        for (size_t i = 0; i < chain.delta_history.size(); ++i)
            out << i << ' ' << fmt(chain.delta_history[i]) << '\n';
    }
    write_text(path, out.str());
}

// Weighted mean and nearest-rank 2.5%/97.5% of a weighted sample.
PosteriorSummary weighted_summary(std::vector<std::pair<double, double>> vw) {
    double total = 0.0;
    for (const auto& p : vw) total += p.second;
    require(total > 0.0, ErrorCode::degenerate, "all weights are zero");
    PosteriorSummary out;
    for (const auto& p : vw) out.mean += p.first * (p.second / total);
    std::sort(vw.begin(), vw.end());
    double cum = 0.0;
    bool lower_set = false;
    out.lower = vw.front().first;
    out.upper = vw.back().first;
    for (const auto& p : vw) {
        cum += p.second / total;
        if (!lower_set && cum >= 0.025) {
            out.lower = p.first;
            lower_set = true;
        }
        if (cum >= 0.975) {
            out.upper = p.first;
            break;
        }
    }
    return out;
}

ordered_json posterior_block(const Chain& chain, size_t discard,
                             const std::vector<std::string>& names) {
    ordered_json arr = ordered_json::array();
    for (size_t j = 0; j < names.size(); ++j) {
        std::vector<double> draws = chain.natural_coordinate(j, discard);
        PosteriorSummary s = posterior_summary(std::move(draws));
        ordered_json e;
        e["name"] = names[j];
        e["mean"] = num(s.mean);
        e["lower"] = num(s.lower);
        e["upper"] = num(s.upper);
        arr.push_back(e);
    }
    return arr;
}

void write_mcmc_diagnostics(const ExperimentConfig& cfg, const Chain& chain,
                            const std::string& sampler,
                            const std::string& path) {
    ChainDiagnostics d = diagnose_chain(chain, cfg.discard);
    ordered_json j;
    j["name"] = cfg.name;
    j["version"] = RSABC_VERSION_STRING;
    j["sampler"] = sampler;
    j["n_iterations"] = chain.size();
    j["discard"] = cfg.discard;
    j["acceptance_rate"] = num(chain.acceptance_rate);
    j["wall_seconds"] = num(chain.wall_seconds);
    j["final_delta"] = num(chain.final_delta);
    ordered_json iat_arr = ordered_json::array(), ess_arr = ordered_json::array();
    for (double v : d.iat_per_coordinate) iat_arr.push_back(num(v));
    for (double v : d.ess_per_coordinate) ess_arr.push_back(num(v));
    j["iat"] = iat_arr;
    j["ess"] = ess_arr;
    j["worst_iat"] = num(d.worst_iat);
    j["worst_ess"] = num(d.worst_ess);
    j["ess_per_minute"] = num(d.ess_per_minute);
    j["posterior"] = posterior_block(chain, cfg.discard, chain.param_names);
    write_text(path, j.dump(2) + "\n");
}

struct SmcTraceRow {
    size_t iteration;
    double delta, ess_value, acceptance;
};

void write_smc_outputs(const ExperimentConfig& cfg, const Model& model,
                       const ParticlePopulation& pop,
                       const std::vector<SmcTraceRow>& trace,
                       RunArtifacts& art) {
    fs::path dir(art.output_dir);

    std::ostringstream p;
    p << "# index";
    for (const std::string& n : model.param_names()) p << ' ' << n;
    p << " distance log_weight\n";
    for (size_t i = 0; i < pop.size(); ++i) {
        p << i;
        for (double v : pop.particles[i]) p << ' ' << fmt(v);
        p << ' ' << fmt(pop.distances[i]) << ' ' << fmt(pop.log_weights[i])
          << '\n';
    }
    art.particles_path = (dir / "particles.txt").string();
    write_text(art.particles_path, p.str());

    std::ostringstream t;
    t << "# iteration delta ess move_acceptance\n";
    for (const SmcTraceRow& r : trace)
        t << r.iteration << ' ' << fmt(r.delta) << ' ' << fmt(r.ess_value)
          << ' ' << fmt(r.acceptance) << '\n';
    art.threshold_path = (dir / "threshold_trace.txt").string();
    write_text(art.threshold_path, t.str());

    std::vector<double> w = pop.normalized_weights();
    ordered_json j;
    j["name"] = cfg.name;
    j["version"] = RSABC_VERSION_STRING;
    j["sampler"] = "smc";
    j["n_particles"] = pop.size();
    j["iterations"] = pop.iteration;
    j["final_delta"] = num(pop.delta);
    j["ess"] = num(ess(w));
    j["last_move_acceptance"] = num(pop.last_move_acceptance);
    ordered_json post = ordered_json::array();
    std::vector<std::string> names = model.param_names();
    for (size_t c = 0; c < names.size(); ++c) {
        std::vector<std::pair<double, double>> vw;
        for (size_t i = 0; i < pop.size(); ++i)
            vw.emplace_back(model.natural(pop.particles[i])[c], w[i]);
        PosteriorSummary s = weighted_summary(std::move(vw));
        ordered_json e;
        e["name"] = names[c];
        e["mean"] = num(s.mean);
        e["lower"] = num(s.lower);
        e["upper"] = num(s.upper);
        post.push_back(e);
    }
    j["posterior"] = post;
    art.diagnostics_path = (dir / "diagnostics.json").string();
    write_text(art.diagnostics_path, j.dump(2) + "\n");
}

void write_manifest(const ExperimentConfig& cfg, const std::string& mode,
                    RunArtifacts& art) {
    ordered_json j;
    j["name"] = cfg.name;
    j["version"] = RSABC_VERSION_STRING;
    j["mode"] = mode;
    j["model"] = cfg.model;
    j["seed"] = cfg.seed;
    if (!cfg.observed_path.empty())
        j["observed"] = cfg.observed_path;
    else
        j["theta_true"] = cfg.theta_true;
    ordered_json stages = ordered_json::array();
    for (const StageConfig& s : cfg.stages) {
        ordered_json e;
        e["sampler"] = s.sampler;
        if (s.sampler != "smc") e["n_iter"] = s.n_iter;
        stages.push_back(e);
    }
    j["stages"] = stages;
    ordered_json files = ordered_json::array();
    auto rel = [&](const std::string& p) {
        return fs::path(p).filename().string();
    };
    if (!art.chain_path.empty()) files.push_back(rel(art.chain_path));
    for (const std::string& p : art.stage_chain_paths)
        files.push_back(rel(p));
    if (!art.particles_path.empty()) files.push_back(rel(art.particles_path));
    if (!art.sweep_path.empty()) files.push_back(rel(art.sweep_path));
    if (!art.diagnostics_path.empty())
        files.push_back(rel(art.diagnostics_path));
    if (!art.threshold_path.empty()) files.push_back(rel(art.threshold_path));
    for (const std::string& p : art.density_paths) files.push_back(rel(p));
    files.push_back("config_echo.json");
    j["files"] = files;
    art.manifest_path = (fs::path(art.output_dir) / "manifest.json").string();
    write_text(art.manifest_path, j.dump(2) + "\n");
}

ParameterVector resolve_init(const ExperimentConfig& cfg, const Model& model) {
    if (!cfg.init.empty()) {
        require(model.log_prior(cfg.init) > kNegInf, ErrorCode::startup,
                "'init' lies outside the prior support");
        return cfg.init;
    }
    RandomStream rng(cfg.seed, kStreamInit);
    return model.sample_prior(rng);
}

StrataSpec resolve_strata(const StageConfig& stage, double delta) {
    if (stage.breaks_given) return StrataSpec(stage.breaks);
    return default_strata(delta);
}

Chain run_stage(const ExperimentConfig& cfg, const Model& model,
                const GaussianModel* gauss, const SummaryVector& s_obs,
                long long ising_s_obs, const StageConfig& stage, size_t index,
                const ParameterVector& init, const ScalingMatrix& sigma,
                double inherited_delta, const std::vector<double>& inherited_cov,
                RandomStream& rng) {
    SamplerOptions opt;
    opt.kernel = cfg.kernel;
    AdaptiveProposal proposal = build_proposal(cfg, stage, model.n_params());
    if (index > 0 && stage.inherit && !inherited_cov.empty())
        proposal.set_covariance(inherited_cov);

    double delta = stage.delta;
    if (delta <= 0.0 && index > 0 && stage.inherit) delta = inherited_delta;

    if (stage.sampler == "pm")
        return run_pm_abc_mcmc(model, s_obs, stage.m, delta, sigma,
                               stage.n_iter, init, proposal, rng, opt);
    if (stage.sampler == "r") {
        ThresholdSchedule schedule;
        schedule.delta = stage.delta;  // 0 requests self-tuning
        schedule.psi = stage.psi;
        schedule.check_period = stage.check_period;
        schedule.tune = stage.tune_delta;
        return run_r_abc_mcmc(model, s_obs, stage.r, schedule, sigma,
                              stage.n_iter, stage.k_burnin, init, proposal,
                              rng, opt);
    }
    if (stage.sampler == "rs" || stage.sampler == "xrs") {
        require(delta > 0.0, ErrorCode::config,
                "stratified stage has no threshold to inherit");
        StrataSpec spec = resolve_strata(stage, delta);
        if (stage.sampler == "rs")
            return run_rs_abc_mcmc(model, s_obs, stage.r1, stage.r2, spec,
                                   delta, sigma, stage.n_iter, init, proposal,
                                   rng, opt);
        return run_xrs_abc_mcmc(model, s_obs, stage.r1, stage.r2, spec, delta,
                                sigma, stage.n_iter, init, proposal, rng, opt);
    }
    if (stage.sampler == "exchange") {
        const auto& ising = dynamic_cast<const IsingModel&>(model);
        return ising_exchange_sampler(ising, ising_s_obs, stage.n_iter,
                                      stage.exchange_sd, init, rng);
    }
    if (stage.sampler == "exact") {
        require(gauss != nullptr, ErrorCode::config,
                "exact sampler requires the gaussian model");
        double s = s_obs[0];
        size_t n = gauss->n_obs();
        auto loglik = [s, n](const ParameterVector& th) {
            return gaussian_exact_summary_loglik(th[0], s, n);
        };
        return run_mh_with_loglik(model, loglik, stage.n_iter, init, proposal,
                                  rng);
    }
    fail(ErrorCode::config, "unknown sampler: " + stage.sampler);
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& cfg) {
    fs::path out(cfg.output_dir);
    const char* root = std::getenv("RSABC_OUT_ROOT");
    if (root && *root && out.is_relative()) out = fs::path(root) / out;
    return out.string();
}

std::vector<std::string> emit_plot_data(const Chain& chain, size_t discard,
                                        const Model& model,
                                        const std::string& output_dir) {
    require(chain.size() > discard, ErrorCode::invalid_argument,
            "empty chain");
    std::vector<std::string> paths;
    std::vector<std::string> names = model.param_names();
    for (size_t j = 0; j < names.size(); ++j) {
        std::vector<double> x = chain.natural_coordinate(j, discard);
        size_t n = x.size();
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : x) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n);
        double sd = std::sqrt(var);
        std::vector<double> sorted = x;
        std::sort(sorted.begin(), sorted.end());
        double iqr = nearest_rank_percentile(sorted, 75.0) -
                     nearest_rank_percentile(sorted, 25.0);
        double spread = sd;
        if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
        require(spread > 0.0, ErrorCode::degenerate,
                "constant chain coordinate has no density");
        double h = 0.9 * spread *
                   std::pow(static_cast<double>(n), -0.2);  // Silverman
        const size_t grid_n = 256;
        double lo = sorted.front() - 3.0 * h, hi = sorted.back() + 3.0 * h;
        double step = (hi - lo) / static_cast<double>(grid_n - 1);
        std::vector<double> gx(grid_n), gy(grid_n);
        const double norm = 1.0 / (static_cast<double>(n) * h *
                                   std::sqrt(2.0 * 3.14159265358979323846));
        for (size_t g = 0; g < grid_n; ++g) {
            gx[g] = lo + step * static_cast<double>(g);
            double acc = 0.0;
            for (double v : x) {
                double z = (gx[g] - v) / h;
                acc += std::exp(-0.5 * z * z);
            }
            gy[g] = acc * norm;
        }
        // Exact trapezoid normalization so the grid integrates to 1.
        double integral = 0.0;
        for (size_t g = 0; g + 1 < grid_n; ++g)
            integral += 0.5 * (gy[g] + gy[g + 1]) * step;
        require(integral > 0.0, ErrorCode::degenerate, "degenerate density");
        std::ostringstream out;
        out << "# " << names[j] << " density\n";
        for (size_t g = 0; g < grid_n; ++g)
            out << fmt(gx[g]) << ' ' << fmt(gy[g] / integral) << '\n';
        std::string path =
            (fs::path(output_dir) / ("density_" + names[j] + ".txt")).string();
        write_text(path, out.str());
        paths.push_back(path);
    }
    return paths;
}

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
    std::unique_ptr<Model> model = build_model(cfg);
    const auto* gauss = dynamic_cast<const GaussianModel*>(model.get());

    RunArtifacts art;
    art.output_dir = resolve_output_dir(cfg);
    fs::create_directories(art.output_dir);
    fs::path dir(art.output_dir);

    art.config_echo_path = (dir / "config_echo.json").string();
    write_text(art.config_echo_path, cfg.source_text);

    Dataset observed = load_observed(cfg, *model);
    SummaryVector s_obs = model->summarize(observed);
    long long ising_s_obs = 0;
    if (const auto* grid = std::get_if<SpinGrid>(&observed))
        ising_s_obs = ising_statistic(*grid);

    if (cfg.stages.front().sampler == "smc") {
        const StageConfig& stage = cfg.stages.front();
        require(cfg.sigma.mode != SigmaMode::pilot_at_init, ErrorCode::config,
                "sigma mode 'pilot_at_init' needs a chain starting point");
        ScalingMatrix sigma = resolve_sigma(cfg, *model, {});
        SmcSettings settings = stage.smc;
        settings.kernel = cfg.kernel;
        std::vector<SmcTraceRow> trace;
        SmcSnapshotFn snap = [&](const ParticlePopulation& pop, double acc) {
            trace.push_back({pop.iteration, pop.delta,
                             ess_from_log(pop.log_weights), acc});
        };
        RandomStream rng(cfg.seed, kStreamStageBase);
        ParticlePopulation pop =
            run_abc_smc(*model, s_obs, sigma, settings, rng, snap);
        write_smc_outputs(cfg, *model, pop, trace, art);
        write_manifest(cfg, "run", art);
        return art;
    }

    ParameterVector init = resolve_init(cfg, *model);
    ScalingMatrix sigma = resolve_sigma(cfg, *model, init);

    Chain chain;
    double inherited_delta = 0.0;
    std::vector<double> inherited_cov;
    for (size_t k = 0; k < cfg.stages.size(); ++k) {
        const StageConfig& stage = cfg.stages[k];
        RandomStream rng(cfg.seed, kStreamStageBase + k);
        ParameterVector stage_init = init;
        ScalingMatrix stage_sigma = sigma;
        if (k > 0 && stage.inherit) {
            stage_init = chain.final_theta;
            stage_sigma = chain.final_sigma;
        }
        chain = run_stage(cfg, *model, gauss, s_obs, ising_s_obs, stage, k,
                          stage_init, stage_sigma, inherited_delta,
                          inherited_cov, rng);
        inherited_delta = chain.final_delta;
        inherited_cov = chain.final_proposal_cov;
        if (cfg.stages.size() > 1) {
            std::string p =
                (dir / ("chain_stage" + std::to_string(k + 1) + ".txt"))
                    .string();
            write_chain_file(chain, p);
            art.stage_chain_paths.push_back(p);
        }
    }

    art.chain_path = (dir / "chain.txt").string();
    write_chain_file(chain, art.chain_path);
    art.threshold_path = (dir / "threshold_trace.txt").string();
    write_threshold_trace(chain, art.threshold_path);
    art.diagnostics_path = (dir / "diagnostics.json").string();
    write_mcmc_diagnostics(cfg, chain, cfg.stages.back().sampler,
                           art.diagnostics_path);
    art.density_paths =
        emit_plot_data(chain, cfg.discard, *model, art.output_dir);
    write_manifest(cfg, "run", art);
    return art;
}

std::vector<SweepPoint> likelihood_sweep(const Model& model,
                                         const SummaryVector& s_obs,
                                         const ScalingMatrix& sigma,
                                         KernelKind kernel,
                                         const StageConfig& stage,
                                         const SweepSettings& settings,
                                         RandomStream& rng) {
    require(model.n_params() == 1, ErrorCode::config,
            "likelihood sweeps need a 1-parameter model");
    require(settings.n_points >= 2 && settings.hi > settings.lo,
            ErrorCode::invalid_argument, "bad sweep grid");
    require(settings.n_reps >= 1, ErrorCode::invalid_argument,
            "bad sweep replication count");
    const std::string& sp = stage.sampler;
    require(sp == "pm" || sp == "r" || sp == "rs" || sp == "xrs",
            ErrorCode::config, "sweep supports samplers pm|r|rs|xrs");
    double delta = stage.delta;
    require(delta > 0.0, ErrorCode::config, "sweep needs a fixed delta");

    size_t n_s = model.n_summaries();
    BlockScheme scheme = model.default_scheme();
    bool strat = sp == "rs" || sp == "xrs";
    StrataSpec spec = strat ? resolve_strata(stage, delta) : StrataSpec{};

    // Index matrices are frozen for the whole sweep, exactly as the MCMC
    // samplers freeze them for a whole run; only the datasets are redrawn.
    RandomStream shape_rng(rng.master_seed(), kStreamSweepShape);
    IndexMatrix u1, u2;
    {
        ParameterVector mid = {0.5 * (settings.lo + settings.hi)};
        if (!(model.log_prior(mid) > kNegInf)) mid[0] = settings.lo;
        Dataset shape = model.simulate(mid, shape_rng);
        if (sp == "r") u1 = make_index_matrix(stage.r, scheme, shape, shape_rng);
        if (strat) {
            u1 = make_index_matrix(stage.r1, scheme, shape, shape_rng);
            u2 = make_index_matrix(stage.r2, scheme, shape, shape_rng);
        }
    }

    Matrix summ1, summ2;
    SummaryVector row_buf(n_s);
    auto distances_of = [&](const Matrix& m, std::vector<double>& d) {
        d.resize(m.rows);
        for (size_t r = 0; r < m.rows; ++r) {
            for (size_t c = 0; c < n_s; ++c) row_buf[c] = m(r, c);
            d[r] = scaled_distance(row_buf, s_obs, sigma);
        }
    };
    auto log_kernels_of = [&](const std::vector<double>& d,
                              std::vector<double>& lk) {
        lk.resize(d.size());
        for (size_t r = 0; r < d.size(); ++r)
            lk[r] = log_kernel_from_distance(kernel, d[r], delta, n_s);
    };

    std::vector<SweepPoint> out;
    double step = (settings.hi - settings.lo) /
                  static_cast<double>(settings.n_points - 1);
    std::vector<double> d1, d2, lk1, lk2, logs;
    for (size_t g = 0; g < settings.n_points; ++g) {
        ParameterVector theta = {settings.lo +
                                 step * static_cast<double>(g)};
        std::vector<double> estimates;
        estimates.reserve(settings.n_reps);
        size_t total_attempts = 0;
        for (size_t rep = 0; rep < settings.n_reps; ++rep) {
            if (sp == "pm") {
                logs.resize(stage.m);
                for (size_t i = 0; i < stage.m; ++i) {
                    Dataset x = model.simulate(theta, rng);
                    SummaryVector s = model.summarize(x);
                    double d = scaled_distance(s, s_obs, sigma);
                    logs[i] = log_kernel_from_distance(kernel, d, delta, n_s);
                }
                estimates.push_back(log_mc_likelihood(logs));
                ++total_attempts;
            } else if (sp == "r") {
                Dataset x = model.simulate(theta, rng);
                model.resample_summaries(x, u1, scheme, summ1);
                distances_of(summ1, d1);
                log_kernels_of(d1, lk1);
                estimates.push_back(log_res_likelihood(lk1));
                ++total_attempts;
            } else {
                // Stratified estimates are displayed conditionally on every
                // stratum being occupied; redraw until that holds.
                for (size_t attempt = 0;; ++attempt) {
                    require(attempt < settings.max_attempts,
                            ErrorCode::degenerate,
                            "stratified sweep failed to occupy all strata");
                    ++total_attempts;
                    Dataset xtr = model.simulate(theta, rng);
                    Dataset xte = model.simulate(theta, rng);
                    model.resample_summaries(xtr, u1, scheme, summ1);
                    model.resample_summaries(xte, u2, scheme, summ2);
                    distances_of(summ1, d1);
                    distances_of(summ2, d2);
                    log_kernels_of(d2, lk2);
                    LogLikelihoodEstimate est;
                    if (sp == "rs") {
                        est = log_post_strat_likelihood(d1, d2, lk2, spec);
                    } else {
                        log_kernels_of(d1, lk1);
                        est = log_averaged_strat_likelihood(d1, lk1, d2, lk2,
                                                            spec);
                    }
                    if (!est.neglected_stratum) {
                        estimates.push_back(est.log_value);
                        break;
                    }
                }
            }
        }
        SweepPoint pt;
        pt.theta = theta[0];
        double acc = 0.0;
        for (double e : estimates) acc += e;
        pt.mean_log = acc / static_cast<double>(estimates.size());
        pt.lo_log = nearest_rank_percentile(estimates, 2.5);
        pt.hi_log = nearest_rank_percentile(estimates, 97.5);
        pt.mean_attempts = static_cast<double>(total_attempts) /
                           static_cast<double>(settings.n_reps);
        out.push_back(pt);
    }
    return out;
}

RunArtifacts run_sweep(const ExperimentConfig& cfg,
                       const SweepSettings& settings) {
    std::unique_ptr<Model> model = build_model(cfg);
    RunArtifacts art;
    art.output_dir = resolve_output_dir(cfg);
    fs::create_directories(art.output_dir);
    fs::path dir(art.output_dir);
    art.config_echo_path = (dir / "config_echo.json").string();
    write_text(art.config_echo_path, cfg.source_text);

    Dataset observed = load_observed(cfg, *model);
    SummaryVector s_obs = model->summarize(observed);
    require(cfg.sigma.mode != SigmaMode::pilot_at_init || !cfg.init.empty(),
            ErrorCode::config,
            "sigma mode 'pilot_at_init' needs an explicit 'init' in sweeps");
    ScalingMatrix sigma = resolve_sigma(cfg, *model, cfg.init);

    RandomStream rng(cfg.seed, kStreamSweep);
    std::vector<SweepPoint> points = likelihood_sweep(
        *model, s_obs, sigma, cfg.kernel, cfg.stages.front(), settings, rng);

    const auto* gauss = dynamic_cast<const GaussianModel*>(model.get());
    std::ostringstream out;
    out << "# theta mean_loglik p2.5 p97.5 mean_attempts";
    if (gauss) out << " exact_loglik";
    out << '\n';
    for (const SweepPoint& p : points) {
        out << fmt(p.theta) << ' ' << fmt(p.mean_log) << ' ' << fmt(p.lo_log)
            << ' ' << fmt(p.hi_log) << ' ' << fmt(p.mean_attempts);
        if (gauss)
            out << ' '
                << fmt(gaussian_exact_summary_loglik(p.theta, s_obs[0],
                                                     gauss->n_obs()));
        out << '\n';
    }
    art.sweep_path = (dir / "sweep.txt").string();
    write_text(art.sweep_path, out.str());
    write_manifest(cfg, "sweep", art);
    return art;
}

Chain load_chain_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open chain file: " + path);
    Chain chain;
    std::string line;
    size_t p = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::vector<double> vals;
        double v;
        while (row >> v) vals.push_back(v);
        require(vals.size() >= 4, ErrorCode::io,
                "chain rows need at least 4 columns");
        if (p == 0) {
            p = vals.size() - 4;
            for (size_t j = 0; j < p; ++j)
                chain.param_names.push_back("theta" + std::to_string(j + 1));
            chain.log_scale.assign(p, false);
        }
        require(vals.size() == p + 4, ErrorCode::io,
                "inconsistent chain row width");
        ChainRow r;
        r.theta.assign(vals.begin() + 1, vals.begin() + 1 + p);
        r.log_lik = vals[p + 1];
        r.accepted = vals[p + 2] != 0.0;
        r.delta = vals[p + 3];
        chain.rows.push_back(std::move(r));
    }
    require(!chain.rows.empty(), ErrorCode::io, "chain file has no rows");
    size_t accepted = 0;
    for (const ChainRow& r : chain.rows) accepted += r.accepted ? 1 : 0;
    chain.acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(chain.size());
    chain.final_theta = chain.rows.back().theta;
    chain.final_delta = chain.rows.back().delta;
    return chain;
}

}  // namespace rsabc
