#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rsabc/experiment.hpp"

using namespace rsabc;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / "rsabc_unit_config" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

size_t count_problems(const std::string& msg) {
    size_t n = 0;
    for (size_t at = msg.find("\n  - "); at != std::string::npos;
         at = msg.find("\n  - ", at + 1))
        ++n;
    return n;
}

// Small fast single-stage run used by the artifact tests.
std::string mini_gaussian(const std::string& out_dir) {
    return std::string(R"({
        "model": "gaussian",
        "seed": 7,
        "output_dir": ")") +
           out_dir + R"(",
        "theta_true": [0.0],
        "init": [0.0],
        "discard": 10,
        "model_options": {"n_obs": 100},
        "proposal": {"sd": [0.05]},
        "stages": [{"sampler": "pm", "n_iter": 80, "m": 10, "delta": 0.1}]
    })";
}

ExperimentConfig parse_ok(const std::string& text) {
    return parse_config_string(text, fresh_dir("base"), "run");
}

std::string parse_message(const std::string& text) {
    try {
        parse_config_string(text, "/tmp", "run");
    } catch (const Error& e) {
        CHECK(e.code == ErrorCode::config);
        return e.what();
    }
    FAIL("expected a config error");
    return {};
}

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
    ExperimentConfig cfg = parse_ok(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "sampler": "pm",
        "n_iter": 50
    })");
    CHECK(cfg.model == "gaussian");
    CHECK(cfg.seed == 1);
    REQUIRE(cfg.stages.size() == 1);
    CHECK(cfg.stages[0].sampler == "pm");
    CHECK(cfg.stages[0].m == 500);
    CHECK(cfg.stages[0].delta == 3e-4);  // reference threshold when absent
    CHECK(cfg.kernel == KernelKind::gaussian);
    CHECK(cfg.sigma.mode == SigmaMode::identity);
    CHECK(cfg.proposal.adapt);
    CHECK(cfg.proposal.refresh == 500);
    CHECK(cfg.name == "run");
    CHECK(cfg.output_dir == "run_out");

    auto model = build_model(cfg);
    CHECK(model->name() == "gaussian");
}

TEST_CASE("stage keys may appear inline or in a stages array, not both") {
    std::string msg = parse_message(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "n_iter": 50,
        "stages": [{"sampler": "pm", "n_iter": 50}]
    })");
    CHECK(msg.find("cannot appear at top level") != std::string::npos);
}

TEST_CASE("unknown keys are rejected at every level") {
    std::string msg = parse_message(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "wibble": 3,
        "sigma": {"mode": "identity", "wobble": 1},
        "proposal": {"sd": [0.1], "rate": 2},
        "model_options": {"n_obs": 100, "flavour": "x"},
        "stages": [{"sampler": "pm", "n_iter": 50, "colour": "red"}]
    })");
    CHECK(msg.find("'wibble'") != std::string::npos);
    CHECK(msg.find("wobble") != std::string::npos);
    CHECK(msg.find("rate") != std::string::npos);
    CHECK(msg.find("flavour") != std::string::npos);
    CHECK(msg.find("colour") != std::string::npos);
    CHECK(count_problems(msg) == 5);  // every problem reported in one error
}

TEST_CASE("observations come from exactly one source") {
    std::string both = parse_message(R"({
        "model": "gaussian",
        "observed": "x.txt",
        "theta_true": [0.0],
        "sampler": "pm",
        "n_iter": 50
    })");
    CHECK(both.find("exactly one of 'observed' and 'theta_true'") !=
          std::string::npos);
    std::string neither = parse_message(R"({
        "model": "gaussian",
        "sampler": "pm",
        "n_iter": 50
    })");
    CHECK(neither.find("exactly one of") != std::string::npos);
}

TEST_CASE("smc stages exclude chain-only keys") {
    std::string msg = parse_message(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "init": [0.0],
        "discard": 5,
        "proposal": {"sd": [0.1]},
        "stages": [{"sampler": "smc", "smc": {"n_particles": 64}}]
    })");
    CHECK(msg.find("'init' does not apply to smc") != std::string::npos);
    CHECK(msg.find("'discard' does not apply to smc") != std::string::npos);
    CHECK(msg.find("'proposal' does not apply to smc") != std::string::npos);

    std::string iter = parse_message(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "stages": [{"sampler": "smc", "n_iter": 10}]
    })");
    CHECK(iter.find("does not apply to sampler 'smc'") != std::string::npos);

    ExperimentConfig ok = parse_ok(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "sampler": "smc",
        "smc": {"n_particles": 64, "gamma": 0.8, "stop_rate": 0.05}
    })");
    CHECK(ok.stages[0].smc.n_particles == 64);
    CHECK(ok.stages[0].smc.gamma == 0.8);
    CHECK(ok.stages[0].smc.max_iterations == 1000);
}

TEST_CASE("multi-stage pipelines are an r warm-up plus stratified refinement") {
    std::string first = parse_message(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "stages": [{"sampler": "pm", "n_iter": 10, "delta": 0.1},
                   {"sampler": "rs", "n_iter": 10}]
    })");
    CHECK(first.find("must start with sampler 'r'") != std::string::npos);

    std::string second = parse_message(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "stages": [{"sampler": "r", "n_iter": 10},
                   {"sampler": "r", "n_iter": 10}]
    })");
    CHECK(second.find("must use sampler 'rs' or 'xrs'") != std::string::npos);

    ExperimentConfig ok = parse_ok(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "stages": [{"sampler": "r", "n_iter": 10, "psi": 20},
                   {"sampler": "xrs", "n_iter": 10, "strata_breaks": []}]
    })");
    REQUIRE(ok.stages.size() == 2);
    CHECK(ok.stages[1].inherit);
    CHECK(ok.stages[1].delta == 0.0);  // inherited at run time
    CHECK(ok.stages[1].breaks_given);
    CHECK(ok.stages[1].breaks.empty());
}

TEST_CASE("sampler and model pairings are enforced") {
    std::string ex = parse_message(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "sampler": "exchange",
        "n_iter": 10
    })");
    CHECK(ex.find("'exchange' requires model 'ising'") != std::string::npos);

    std::string exact = parse_message(R"({
        "model": "lv",
        "theta_true": [0.0, -5.3, -0.51],
        "sampler": "exact",
        "n_iter": 10
    })");
    CHECK(exact.find("'exact' requires model 'gaussian'") != std::string::npos);

    std::string kernelled = parse_message(R"({
        "model": "ising",
        "theta_true": [0.3],
        "kernel": "gaussian",
        "sigma": {"mode": "identity"},
        "sampler": "exchange",
        "n_iter": 10
    })");
    CHECK(kernelled.find("'kernel' does not apply") != std::string::npos);
    CHECK(kernelled.find("'sigma' does not apply") != std::string::npos);
}

TEST_CASE("model knobs are validated by the model itself") {
    std::string msg = parse_message(R"({
        "model": "lv",
        "theta_true": [0.0, -5.3, -0.51],
        "model_options": {"block": 7},
        "sampler": "pm",
        "n_iter": 10,
        "delta": 0.2
    })");
    CHECK(msg.find("block") != std::string::npos);

    std::string dims = parse_message(R"({
        "model": "lv",
        "theta_true": [0.0],
        "sampler": "pm",
        "n_iter": 10,
        "delta": 0.2
    })");
    CHECK(dims.find("'theta_true' must have 3 entries") != std::string::npos);
}

TEST_CASE("fixed sigma must match the summary count") {
    std::string msg = parse_message(R"({
        "model": "lv",
        "theta_true": [0.0, -5.3, -0.51],
        "sigma": {"mode": "fixed", "values": [1.0, 2.0]},
        "sampler": "pm",
        "n_iter": 10,
        "delta": 0.2
    })");
    CHECK(msg.find("'sigma.values' must have 9 entries") != std::string::npos);

    ExperimentConfig ok = parse_ok(R"({
        "model": "gaussian",
        "theta_true": [0.0],
        "sigma": {"mode": "pilot_prior", "n_pilot": 20},
        "sampler": "pm",
        "n_iter": 10,
        "delta": 0.2
    })");
    CHECK(ok.sigma.mode == SigmaMode::pilot_prior);
    CHECK(ok.sigma.n_pilot == 20);
}

TEST_CASE("broken json surfaces as a config error") {
    CHECK_THROWS_AS(parse_config_string("{\"model\": ", "/tmp", "x"), Error);
    std::string msg = parse_message("[1, 2, 3]");
    CHECK(!msg.empty());
}

TEST_CASE("output directory resolution honours the environment root") {
    ExperimentConfig cfg;
    cfg.output_dir = "rel/dir";
    unsetenv("RSABC_OUT_ROOT");
    CHECK(resolve_output_dir(cfg) == "rel/dir");
    setenv("RSABC_OUT_ROOT", "/tmp/rsabc_root", 1);
    CHECK(resolve_output_dir(cfg) ==
          (fs::path("/tmp/rsabc_root") / "rel/dir").string());
    cfg.output_dir = "/abs/dir";
    CHECK(resolve_output_dir(cfg) == "/abs/dir");
    unsetenv("RSABC_OUT_ROOT");
}

TEST_CASE("experiment reruns are byte identical") {
    std::string out1 = fresh_dir("rerun_a");
    std::string out2 = fresh_dir("rerun_b");
    ExperimentConfig c1 = parse_ok(mini_gaussian(out1));
    ExperimentConfig c2 = parse_ok(mini_gaussian(out2));
    RunArtifacts a1 = run_experiment(c1);
    RunArtifacts a2 = run_experiment(c2);
    CHECK(slurp(a1.chain_path) == slurp(a2.chain_path));
    CHECK(slurp(a1.threshold_path) == slurp(a2.threshold_path));
    for (size_t i = 0; i < a1.density_paths.size(); ++i)
        CHECK(slurp(a1.density_paths[i]) == slurp(a2.density_paths[i]));
    // config echo carries the exact source text
    CHECK(slurp(a1.config_echo_path) == c1.source_text);
}

TEST_CASE("experiment artifacts parse and are internally consistent") {
    std::string out = fresh_dir("artifacts");
    ExperimentConfig cfg = parse_ok(mini_gaussian(out));
    RunArtifacts art = run_experiment(cfg);

    Chain chain = load_chain_file(art.chain_path);
    REQUIRE(chain.size() == 80);
    CHECK(chain.param_names.size() == 1);
    CHECK(chain.acceptance_rate >= 0.0);
    CHECK(chain.acceptance_rate <= 1.0);
    CHECK(chain.final_delta == 0.1);

    nlohmann::json diag = nlohmann::json::parse(slurp(art.diagnostics_path));
    CHECK(diag.at("sampler") == "pm");
    CHECK(diag.at("n_iterations") == 80);
    CHECK(diag.at("discard") == 10);
    CHECK(diag.at("iat").size() == 1);
    CHECK(diag.at("posterior").size() == 1);
    double acc = diag.at("acceptance_rate").get<double>();
    CHECK(acc == doctest::Approx(chain.acceptance_rate).epsilon(1e-12));

    nlohmann::json man = nlohmann::json::parse(slurp(art.manifest_path));
    CHECK(man.at("model") == "gaussian");
    CHECK(man.at("seed") == 7);
    CHECK(man.contains("files"));

    REQUIRE(art.density_paths.size() == 1);
    std::istringstream dens(slurp(art.density_paths[0]));
    std::string header;
    std::getline(dens, header);
    CHECK(header.find("density") != std::string::npos);
    std::vector<double> gx, gy;
    double x, y;
    while (dens >> x >> y) {
        gx.push_back(x);
        gy.push_back(y);
    }
    REQUIRE(gx.size() == 256);
    double integral = 0.0;
    for (size_t i = 0; i + 1 < gx.size(); ++i)
        integral += 0.5 * (gy[i] + gy[i + 1]) * (gx[i + 1] - gx[i]);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stage handoff carries threshold and state forward") {
    std::string out = fresh_dir("handoff");
    ExperimentConfig cfg = parse_ok(std::string(R"({
        "model": "gaussian",
        "seed": 11,
        "output_dir": ")") + out + R"(",
        "theta_true": [0.0],
        "init": [0.0],
        "model_options": {"n_obs": 100},
        "proposal": {"sd": [0.05]},
        "stages": [
          {"sampler": "r", "n_iter": 120, "r": 60, "psi": 30, "k_burnin": 40},
          {"sampler": "xrs", "n_iter": 60, "r1": 60, "r2": 60,
           "strata_breaks": []}
        ]
    })");
    RunArtifacts art = run_experiment(cfg);
    REQUIRE(art.stage_chain_paths.size() == 2);

    Chain warm = load_chain_file(art.stage_chain_paths[0]);
    Chain refine = load_chain_file(art.stage_chain_paths[1]);
    REQUIRE(warm.size() == 120);
    REQUIRE(refine.size() == 60);
    // the refinement stage runs at the tuned threshold of the warm-up
    for (const ChainRow& r : refine.rows)
        CHECK(r.delta == warm.final_delta);
    // final chain artifact is the last stage
    CHECK(slurp(art.chain_path) == slurp(art.stage_chain_paths[1]));
}

TEST_CASE("sweep artifacts include the exact gaussian curve") {
    std::string out = fresh_dir("sweep");
    ExperimentConfig cfg = parse_ok(std::string(R"({
        "model": "gaussian",
        "seed": 5,
        "output_dir": ")") + out + R"(",
        "theta_true": [0.0],
        "model_options": {"n_obs": 100},
        "sampler": "pm",
        "n_iter": 10,
        "m": 5,
        "delta": 0.1
    })");
    SweepSettings st;
    st.lo = -0.1;
    st.hi = 0.1;
    st.n_points = 3;
    st.n_reps = 10;
    RunArtifacts art = run_sweep(cfg, st);
    std::string table = slurp(art.sweep_path);
    CHECK(table.find("exact_loglik") != std::string::npos);
    std::istringstream in(table);
    std::string line;
    std::getline(in, line);  // header
    size_t rows = 0;
    double theta, mean_log, lo, hi, attempts, exact;
    while (in >> theta >> mean_log >> lo >> hi >> attempts >> exact) {
        CHECK(lo <= mean_log);
        CHECK(mean_log <= hi);
        CHECK(attempts == doctest::Approx(1.0));  // pm: one estimate per rep
        CHECK(std::isfinite(exact));
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("chain file loader rejects nonsense") {
    std::string out = fresh_dir("loader");
    std::string path = out + "/bogus.txt";
    {
        std::ofstream f(path);
        f << "# header only\n";
    }
    CHECK_THROWS_AS(load_chain_file(path), Error);
    CHECK_THROWS_AS(load_chain_file(out + "/missing.txt"), Error);
}

TEST_CASE("density emission refuses an empty retained chain") {
    GaussianModel model(100);
    Chain chain;
    chain.param_names = {"theta"};
    chain.log_scale = {false};
    CHECK_THROWS_AS(emit_plot_data(chain, 0, model, fresh_dir("dens")), Error);
}
