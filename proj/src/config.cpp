#include "rsabc/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rsabc {

namespace {

using nlohmann::json;

const std::set<std::string> kSamplers = {"pm", "r",        "rs",   "xrs",
                                         "smc", "exchange", "exact"};
const std::set<std::string> kModels = {"gaussian", "gk", "ising", "lv"};

struct Collector {
    std::vector<std::string> errors;
    void add(const std::string& e) { errors.push_back(e); }
};

std::string where_key(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed, Collector& c) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            c.add("unknown key '" + where_key(where, item.key()) + "'");
}

bool is_intlike(const json& v) {
    return v.is_number_integer() || v.is_number_unsigned();
}

double get_num(const json& o, const std::string& where, const std::string& key,
               double dflt, Collector& c, bool* present = nullptr) {
    if (present) *present = false;
    if (!o.contains(key)) return dflt;
    if (present) *present = true;
    const json& v = o.at(key);
    if (!v.is_number()) {
        c.add("'" + where_key(where, key) + "' must be a number");
        return dflt;
    }
    return v.get<double>();
}

int64_t get_int(const json& o, const std::string& where, const std::string& key,
                int64_t dflt, Collector& c, bool* present = nullptr) {
    if (present) *present = false;
    if (!o.contains(key)) return dflt;
    if (present) *present = true;
    const json& v = o.at(key);
    if (!is_intlike(v)) {
        c.add("'" + where_key(where, key) + "' must be an integer");
        return dflt;
    }
    return v.get<int64_t>();
}

bool get_bool(const json& o, const std::string& where, const std::string& key,
              bool dflt, Collector& c, bool* present = nullptr) {
    if (present) *present = false;
    if (!o.contains(key)) return dflt;
    if (present) *present = true;
    const json& v = o.at(key);
    if (!v.is_boolean()) {
        c.add("'" + where_key(where, key) + "' must be a boolean");
        return dflt;
    }
    return v.get<bool>();
}

std::string get_str(const json& o, const std::string& where,
                    const std::string& key, const std::string& dflt,
                    Collector& c, bool* present = nullptr) {
    if (present) *present = false;
    if (!o.contains(key)) return dflt;
    if (present) *present = true;
    const json& v = o.at(key);
    if (!v.is_string()) {
        c.add("'" + where_key(where, key) + "' must be a string");
        return dflt;
    }
    return v.get<std::string>();
}

std::vector<double> get_num_array(const json& o, const std::string& where,
                                  const std::string& key, Collector& c,
                                  bool* present = nullptr) {
    if (present) *present = false;
    if (!o.contains(key)) return {};
    if (present) *present = true;
    const json& v = o.at(key);
    if (!v.is_array()) {
        c.add("'" + where_key(where, key) + "' must be an array of numbers");
        return {};
    }
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) {
            c.add("'" + where_key(where, key) + "' must contain only numbers");
            return {};
        }
        out.push_back(e.get<double>());
    }
    return out;
}

ProposalConfig parse_proposal(const json& o, const std::string& where,
                              Collector& c) {
    ProposalConfig p;
    if (!o.is_object()) {
        c.add("'" + where + "' must be an object");
        return p;
    }
    check_keys(o, where, {"sd", "adapt", "refresh"}, c);
    if (o.contains("sd")) {
        const json& v = o.at("sd");
        if (v.is_number()) {
            p.sd = {v.get<double>()};
        } else {
            p.sd = get_num_array(o, where, "sd", c);
        }
        for (double s : p.sd)
            if (!(s > 0.0)) {
                c.add("'" + where + ".sd' entries must be > 0");
                break;
            }
    }
    p.adapt = get_bool(o, where, "adapt", true, c);
    int64_t refresh = get_int(o, where, "refresh", 500, c);
    if (refresh < 1)
        c.add("'" + where + ".refresh' must be >= 1");
    else
        p.refresh = static_cast<size_t>(refresh);
    return p;
}

// Keys a stage object may carry, by sampler.
const std::set<std::string> kStageKeys = {
    "sampler", "n_iter",       "m",          "r",
    "r1",      "r2",           "delta",      "psi",
    "k_burnin", "check_period", "tune_delta", "strata_breaks",
    "smc",     "exchange_sd",  "proposal",   "inherit"};

StageConfig parse_stage(const json& o, const std::string& where, Collector& c,
                        std::set<std::string>& present) {
    StageConfig s;
    for (const auto& item : o.items())
        if (kStageKeys.count(item.key())) present.insert(item.key());

    s.sampler = get_str(o, where, "sampler", "", c);
    if (!kSamplers.count(s.sampler))
        c.add("'" + where_key(where, "sampler") + "' must be one of "
              "pm|r|rs|xrs|smc|exchange|exact");

    int64_t n_iter = get_int(o, where, "n_iter", 0, c);
    if (present.count("n_iter") && n_iter < 1)
        c.add("'" + where_key(where, "n_iter") + "' must be >= 1");
    else
        s.n_iter = static_cast<size_t>(std::max<int64_t>(n_iter, 0));

    auto positive_count = [&](const char* key, size_t dflt) -> size_t {
        int64_t v = get_int(o, where, key, static_cast<int64_t>(dflt), c);
        if (v < 1) {
            c.add("'" + where_key(where, key) + "' must be >= 1");
            return dflt;
        }
        return static_cast<size_t>(v);
    };
    s.m = positive_count("m", 500);
    s.r = positive_count("r", 500);
    s.r1 = positive_count("r1", 500);
    s.r2 = positive_count("r2", 500);

    s.delta = get_num(o, where, "delta", 0.0, c, &s.delta_given);
    if (s.delta_given && !(s.delta > 0.0))
        c.add("'" + where_key(where, "delta") + "' must be > 0");
    s.psi = get_num(o, where, "psi", 5.0, c);
    if (!(s.psi > 0.0 && s.psi <= 100.0))
        c.add("'" + where_key(where, "psi") + "' must lie in (0, 100]");
    s.k_burnin = static_cast<size_t>(
        std::max<int64_t>(get_int(o, where, "k_burnin", 0, c), 0));
    s.check_period = static_cast<size_t>(
        std::max<int64_t>(get_int(o, where, "check_period", 0, c), 0));
    s.tune_delta = get_bool(o, where, "tune_delta", true, c);

    s.breaks = get_num_array(o, where, "strata_breaks", c, &s.breaks_given);
    for (size_t i = 0; i < s.breaks.size(); ++i) {
        bool bad = !(s.breaks[i] > 0.0) ||
                   (i > 0 && !(s.breaks[i] > s.breaks[i - 1]));
        if (bad) {
            c.add("'" + where_key(where, "strata_breaks") +
                  "' must be strictly increasing and positive");
            break;
        }
    }

    if (o.contains("smc")) {
        const json& v = o.at("smc");
        std::string sw = where_key(where, "smc");
        if (!v.is_object()) {
            c.add("'" + sw + "' must be an object");
        } else {
            check_keys(v, sw,
                       {"n_particles", "gamma", "ess_threshold", "stop_rate",
                        "max_iterations"},
                       c);
            int64_t np = get_int(v, sw, "n_particles", 256, c);
            if (np < 2)
                c.add("'" + sw + ".n_particles' must be >= 2");
            else
                s.smc.n_particles = static_cast<size_t>(np);
            s.smc.gamma = get_num(v, sw, "gamma", 0.9, c);
            if (!(s.smc.gamma > 0.0 && s.smc.gamma < 1.0))
                c.add("'" + sw + ".gamma' must lie in (0, 1)");
            s.smc.ess_threshold = get_num(v, sw, "ess_threshold", 0.0, c);
            if (s.smc.ess_threshold < 0.0)
                c.add("'" + sw + ".ess_threshold' must be >= 0");
            s.smc.stop_rate = get_num(v, sw, "stop_rate", 0.01, c);
            if (!(s.smc.stop_rate >= 0.0 && s.smc.stop_rate <= 1.0))
                c.add("'" + sw + ".stop_rate' must lie in [0, 1]");
            int64_t mi = get_int(v, sw, "max_iterations", 1000, c);
            if (mi < 1)
                c.add("'" + sw + ".max_iterations' must be >= 1");
            else
                s.smc.max_iterations = static_cast<size_t>(mi);
        }
    }

    s.exchange_sd = get_num(o, where, "exchange_sd", 0.05, c);
    if (!(s.exchange_sd > 0.0))
        c.add("'" + where_key(where, "exchange_sd") + "' must be > 0");

    if (o.contains("proposal")) {
        s.proposal = parse_proposal(o.at("proposal"),
                                    where_key(where, "proposal"), c);
        s.proposal_given = true;
    }
    s.inherit = get_bool(o, where, "inherit", true, c);
    return s;
}

// Stage keys that only make sense for particular samplers.
void check_stage_relevance(const StageConfig& s,
                           const std::set<std::string>& present,
                           const std::string& where, Collector& c) {
    auto flag = [&](const char* key, bool relevant) {
        if (present.count(key) && !relevant)
            c.add("'" + where_key(where, key) + "' does not apply to sampler '" +
                  s.sampler + "'");
    };
    const std::string& sp = s.sampler;
    bool strat = sp == "rs" || sp == "xrs";
    flag("m", sp == "pm");
    flag("r", sp == "r");
    flag("r1", strat);
    flag("r2", strat);
    flag("delta", sp == "pm" || sp == "r" || strat);
    flag("psi", sp == "r");
    flag("k_burnin", sp == "r");
    flag("check_period", sp == "r");
    flag("tune_delta", sp == "r");
    flag("strata_breaks", strat);
    flag("smc", sp == "smc");
    flag("exchange_sd", sp == "exchange");
    flag("proposal", sp != "smc" && sp != "exchange");
    flag("n_iter", sp != "smc");
    if (sp != "smc" && !present.count("n_iter"))
        c.add("'" + where_key(where, "n_iter") + "' is required for sampler '" +
              sp + "'");
}

void parse_model_options(const json& o, ExperimentConfig& cfg, Collector& c) {
    const std::string where = "model_options";
    if (!o.is_object()) {
        c.add("'model_options' must be an object");
        return;
    }
    if (cfg.model == "gaussian") {
        check_keys(o, where, {"n_obs", "prior_mean", "prior_sd"}, c);
        cfg.n_obs = static_cast<size_t>(
            std::max<int64_t>(get_int(o, where, "n_obs", 1000, c), 0));
        cfg.prior_mean = get_num(o, where, "prior_mean", 0.1, c);
        cfg.prior_sd = get_num(o, where, "prior_sd", 0.2, c);
        if (!(cfg.prior_sd > 0.0)) c.add("'model_options.prior_sd' must be > 0");
        if (cfg.n_obs < 1) c.add("'model_options.n_obs' must be >= 1");
    } else if (cfg.model == "gk") {
        check_keys(o, where, {"n_obs", "c"}, c);
        cfg.n_obs = static_cast<size_t>(
            std::max<int64_t>(get_int(o, where, "n_obs", 2000, c), 0));
        cfg.gk_c = get_num(o, where, "c", 0.8, c);
        if (cfg.n_obs < 8) c.add("'model_options.n_obs' must be >= 8");
    } else if (cfg.model == "ising") {
        check_keys(o, where, {"side", "sweeps", "tile", "prior_lo", "prior_hi"},
                   c);
        cfg.side = static_cast<int>(get_int(o, where, "side", 100, c));
        cfg.sweeps = static_cast<int>(get_int(o, where, "sweeps", 50, c));
        cfg.tile = static_cast<int>(get_int(o, where, "tile", 20, c));
        cfg.ising_prior_lo = get_num(o, where, "prior_lo", 0.0, c);
        cfg.ising_prior_hi = get_num(o, where, "prior_hi", 3.0, c);
    } else if (cfg.model == "lv") {
        check_keys(o, where,
                   {"x1_0", "x2_0", "t_max", "obs_dt", "n_obs", "reaction_cap",
                    "max_events", "interpolation", "prior_lo", "prior_hi",
                    "block"},
                   c);
        cfg.lv.x1_0 = static_cast<int>(get_int(o, where, "x1_0", 50, c));
        cfg.lv.x2_0 = static_cast<int>(get_int(o, where, "x2_0", 100, c));
        cfg.lv.t_max = get_num(o, where, "t_max", 64.0, c);
        cfg.lv.obs_dt = get_num(o, where, "obs_dt", 2.0, c);
        cfg.lv.n_obs = static_cast<size_t>(
            std::max<int64_t>(get_int(o, where, "n_obs", 32, c), 0));
        cfg.lv.reaction_cap = get_int(o, where, "reaction_cap", 0, c);
        cfg.lv.max_events = get_int(o, where, "max_events", 100000, c);
        std::string interp =
            get_str(o, where, "interpolation", "constant", c);
        if (interp == "constant")
            cfg.lv.interpolation = LvInterpolation::piecewise_constant;
        else if (interp == "linear")
            cfg.lv.interpolation = LvInterpolation::linear;
        else
            c.add("'model_options.interpolation' must be constant|linear");
        cfg.lv.prior_lo = get_num(o, where, "prior_lo", -6.0, c);
        cfg.lv.prior_hi = get_num(o, where, "prior_hi", 2.0, c);
        cfg.lv.block = static_cast<size_t>(
            std::max<int64_t>(get_int(o, where, "block", 8, c), 0));
    }
}

ExperimentConfig parse_json(const json& root, const std::string& base_dir,
                            const std::string& name) {
    Collector c;
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.config_dir = base_dir;

    if (!root.is_object()) fail(ErrorCode::config, "config root must be an object");

    std::set<std::string> top_allowed = {
        "model", "seed",   "output_dir", "observed", "theta_true",
        "init",  "discard", "kernel",    "sigma",    "model_options",
        "proposal", "stages"};
    top_allowed.insert(kStageKeys.begin(), kStageKeys.end());
    check_keys(root, "", top_allowed, c);

    cfg.model = get_str(root, "", "model", "", c);
    if (!kModels.count(cfg.model))
        c.add("'model' must be one of gaussian|gk|ising|lv");

    int64_t seed = get_int(root, "", "seed", 1, c);
    if (seed < 0)
        c.add("'seed' must be >= 0");
    else
        cfg.seed = static_cast<uint64_t>(seed);

    cfg.output_dir = get_str(root, "", "output_dir", name + "_out", c);
    bool observed_given = false;
    cfg.observed_path = get_str(root, "", "observed", "", c, &observed_given);
    bool theta_true_given = false;
    cfg.theta_true = get_num_array(root, "", "theta_true", c, &theta_true_given);
    if (observed_given == theta_true_given)
        c.add("exactly one of 'observed' and 'theta_true' is required");

    bool init_given = false;
    cfg.init = get_num_array(root, "", "init", c, &init_given);

    bool discard_given = false;
    int64_t discard = get_int(root, "", "discard", 0, c, &discard_given);
    if (discard < 0)
        c.add("'discard' must be >= 0");
    else
        cfg.discard = static_cast<size_t>(discard);

    bool kernel_given = false;
    std::string kernel = get_str(root, "", "kernel", "gaussian", c, &kernel_given);
    if (kernel == "gaussian")
        cfg.kernel = KernelKind::gaussian;
    else if (kernel == "indicator")
        cfg.kernel = KernelKind::indicator;
    else
        c.add("'kernel' must be gaussian|indicator");

    bool sigma_given = false;
    if (root.contains("sigma")) {
        sigma_given = true;
        const json& v = root.at("sigma");
        if (!v.is_object()) {
            c.add("'sigma' must be an object");
        } else {
            check_keys(v, "sigma", {"mode", "values", "n_pilot"}, c);
            std::string mode = get_str(v, "sigma", "mode", "identity", c);
            if (mode == "identity")
                cfg.sigma.mode = SigmaMode::identity;
            else if (mode == "fixed")
                cfg.sigma.mode = SigmaMode::fixed;
            else if (mode == "pilot_prior")
                cfg.sigma.mode = SigmaMode::pilot_prior;
            else if (mode == "pilot_at_init")
                cfg.sigma.mode = SigmaMode::pilot_at_init;
            else
                c.add("'sigma.mode' must be identity|fixed|pilot_prior|pilot_at_init");
            cfg.sigma.values = get_num_array(v, "sigma", "values", c);
            for (double s : cfg.sigma.values)
                if (!(s > 0.0)) {
                    c.add("'sigma.values' entries must be > 0");
                    break;
                }
            if (cfg.sigma.mode == SigmaMode::fixed && cfg.sigma.values.empty())
                c.add("'sigma.values' is required for fixed mode");
            if (cfg.sigma.mode != SigmaMode::fixed && !cfg.sigma.values.empty())
                c.add("'sigma.values' only applies to fixed mode");
            int64_t np = get_int(v, "sigma", "n_pilot", 100, c);
            if (np < 2)
                c.add("'sigma.n_pilot' must be >= 2");
            else
                cfg.sigma.n_pilot = static_cast<size_t>(np);
        }
    }

    if (root.contains("proposal"))
        cfg.proposal = parse_proposal(root.at("proposal"), "proposal", c);

    // Stages: either an explicit "stages" array or sampler keys at top level.
    std::vector<std::set<std::string>> present_per_stage;
    if (root.contains("stages")) {
        for (const std::string& k : kStageKeys)
            if (k != "proposal" && root.contains(k))
                c.add("'" + k + "' cannot appear at top level next to 'stages'");
        const json& v = root.at("stages");
        if (!v.is_array() || v.empty()) {
            c.add("'stages' must be a nonempty array");
        } else {
            for (size_t i = 0; i < v.size(); ++i) {
                std::string where = "stages[" + std::to_string(i) + "]";
                if (!v[i].is_object()) {
                    c.add("'" + where + "' must be an object");
                    continue;
                }
                check_keys(v[i], where, kStageKeys, c);
                std::set<std::string> present;
                cfg.stages.push_back(parse_stage(v[i], where, c, present));
                present_per_stage.push_back(std::move(present));
            }
        }
    } else {
        std::set<std::string> present;
        cfg.stages.push_back(parse_stage(root, "", c, present));
        present_per_stage.push_back(std::move(present));
    }

    for (size_t i = 0; i < cfg.stages.size(); ++i) {
        std::string where =
            root.contains("stages") ? "stages[" + std::to_string(i) + "]" : "";
        check_stage_relevance(cfg.stages[i], present_per_stage[i], where, c);
    }

    // Pipeline shape: multi-stage runs are an r warm-up refined by rs/xrs.
    if (cfg.stages.size() > 1) {
        if (cfg.stages.front().sampler != "r")
            c.add("multi-stage runs must start with sampler 'r'");
        for (size_t i = 1; i < cfg.stages.size(); ++i) {
            const std::string& sp = cfg.stages[i].sampler;
            if (sp != "rs" && sp != "xrs")
                c.add("stage " + std::to_string(i + 1) +
                      " must use sampler 'rs' or 'xrs'");
        }
    }

    // Per-sampler eligibility against the model and global keys.
    bool any_abc = false;
    for (const StageConfig& s : cfg.stages) {
        if (s.sampler == "exchange" && cfg.model != "ising")
            c.add("sampler 'exchange' requires model 'ising'");
        if (s.sampler == "exact" && cfg.model != "gaussian")
            c.add("sampler 'exact' requires model 'gaussian'");
        if (s.sampler != "exchange" && s.sampler != "exact") any_abc = true;
    }
    if (!any_abc) {
        if (kernel_given) c.add("'kernel' does not apply to this sampler");
        if (sigma_given) c.add("'sigma' does not apply to this sampler");
    }
    if (cfg.stages.size() == 1 && cfg.stages.front().sampler == "smc") {
        if (init_given) c.add("'init' does not apply to smc");
        if (discard_given) c.add("'discard' does not apply to smc");
        if (root.contains("proposal"))
            c.add("'proposal' does not apply to smc");
    } else if (!cfg.stages.empty()) {
        const StageConfig& last = cfg.stages.back();
        if (last.n_iter > 0 && cfg.discard >= last.n_iter)
            c.add("'discard' must be smaller than the final stage's n_iter");
    }

    // Fixed-threshold samplers default to the reference threshold when the
    // stage cannot inherit one.
    for (size_t i = 0; i < cfg.stages.size(); ++i) {
        StageConfig& s = cfg.stages[i];
        bool fixed = s.sampler == "pm" || s.sampler == "rs" || s.sampler == "xrs";
        if (fixed && !s.delta_given && i == 0) s.delta = 3e-4;
    }

    if (root.contains("model_options") && kModels.count(cfg.model))
        parse_model_options(root.at("model_options"), cfg, c);

    // Dimension checks need the model; its constructor also revalidates knobs.
    if (kModels.count(cfg.model)) {
        try {
            std::unique_ptr<Model> model = build_model(cfg);
            size_t p = model->n_params();
            if (!cfg.theta_true.empty() && cfg.theta_true.size() != p)
                c.add("'theta_true' must have " + std::to_string(p) + " entries");
            if (!cfg.init.empty() && cfg.init.size() != p)
                c.add("'init' must have " + std::to_string(p) + " entries");
            if (cfg.sigma.mode == SigmaMode::fixed &&
                cfg.sigma.values.size() != model->n_summaries())
                c.add("'sigma.values' must have " +
                      std::to_string(model->n_summaries()) + " entries");
            auto check_sd = [&](const ProposalConfig& pc, const std::string& w) {
                if (!pc.sd.empty() && pc.sd.size() != 1 && pc.sd.size() != p)
                    c.add("'" + w + ".sd' must have 1 or " + std::to_string(p) +
                          " entries");
            };
            check_sd(cfg.proposal, "proposal");
            for (size_t i = 0; i < cfg.stages.size(); ++i)
                if (cfg.stages[i].proposal_given)
                    check_sd(cfg.stages[i].proposal,
                             "stages[" + std::to_string(i) + "].proposal");
        } catch (const Error& e) {
            c.add(e.what());
        }
    }

    if (!c.errors.empty()) {
        std::ostringstream msg;
        msg << "config invalid (" << c.errors.size() << " problem"
            << (c.errors.size() == 1 ? "" : "s") << "):";
        for (const std::string& e : c.errors) msg << "\n  - " << e;
        fail(ErrorCode::config, msg.str());
    }
    return cfg;
}

}  // namespace

SigmaMode sigma_mode_from_string(const std::string& s) {
    if (s == "identity") return SigmaMode::identity;
    if (s == "fixed") return SigmaMode::fixed;
    if (s == "pilot_prior") return SigmaMode::pilot_prior;
    if (s == "pilot_at_init") return SigmaMode::pilot_at_init;
    fail(ErrorCode::config, "unknown sigma mode: " + s);
}

std::string to_string(SigmaMode m) {
    switch (m) {
        case SigmaMode::identity: return "identity";
        case SigmaMode::fixed: return "fixed";
        case SigmaMode::pilot_prior: return "pilot_prior";
        case SigmaMode::pilot_at_init: return "pilot_at_init";
    }
    return "identity";
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::filesystem::path p(path);
    ExperimentConfig cfg = parse_config_string(
        buf.str(), p.parent_path().string(), p.stem().string());
    return cfg;
}

ExperimentConfig parse_config_string(const std::string& json_text,
                                     const std::string& base_dir,
                                     const std::string& name) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorCode::config, std::string("config is not valid JSON: ") +
                                    e.what());
    }
    ExperimentConfig cfg = parse_json(root, base_dir, name);
    cfg.source_text = root.dump(2) + "\n";
    return cfg;
}

std::unique_ptr<Model> build_model(const ExperimentConfig& cfg) {
    if (cfg.model == "gaussian")
        return std::make_unique<GaussianModel>(cfg.n_obs ? cfg.n_obs : 1000,
                                               cfg.prior_mean, cfg.prior_sd);
    if (cfg.model == "gk")
        return std::make_unique<GkModel>(cfg.n_obs ? cfg.n_obs : 2000, cfg.gk_c);
    if (cfg.model == "ising")
        return std::make_unique<IsingModel>(cfg.side, cfg.sweeps,
                                            cfg.ising_prior_lo,
                                            cfg.ising_prior_hi, cfg.tile);
    if (cfg.model == "lv") return std::make_unique<LotkaVolterraModel>(cfg.lv);
    fail(ErrorCode::config, "unknown model: " + cfg.model);
}

}  // namespace rsabc
