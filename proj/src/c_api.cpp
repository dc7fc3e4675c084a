#include "rsabc/rsabc.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include "json.hpp"

#include "rsabc/config.hpp"
#include "rsabc/diagnostics.hpp"
#include "rsabc/errors.hpp"
#include "rsabc/experiment.hpp"
#include "rsabc/rng.hpp"
#include "rsabc/version.hpp"

namespace {

thread_local std::string g_last_error;

rsabc_status status_of(const rsabc::Error& e) {
    switch (e.code) {
        case rsabc::ErrorCode::config:
            return RSABC_ERR_CONFIG;
        case rsabc::ErrorCode::startup:
            return RSABC_ERR_STARTUP;
        default:
            return RSABC_ERR_RUNTIME;
    }
}

// Runs fn(), routing any exception into the thread-local error slot.
template <typename Fn>
rsabc_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return RSABC_OK;
    } catch (const rsabc::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RSABC_ERR_RUNTIME;
    } catch (...) {
        g_last_error = "unknown failure";
        return RSABC_ERR_RUNTIME;
    }
}

rsabc_status arg_error(const char* msg) {
    g_last_error = msg;
    return RSABC_ERR_RUNTIME;
}

}  // namespace

struct rsabc_config {
    rsabc::ExperimentConfig cfg;
};

struct rsabc_result {
    rsabc::RunArtifacts art;
};

extern "C" {

const char* rsabc_version(void) { return rsabc::version(); }

const char* rsabc_last_error(void) { return g_last_error.c_str(); }

rsabc_status rsabc_config_load(const char* path, rsabc_config** out) {
    if (!path || !out) return arg_error("null argument");
    *out = nullptr;
    return guarded([&] {
        auto* handle = new rsabc_config{rsabc::parse_config(path)};
        *out = handle;
    });
}

rsabc_status rsabc_config_load_string(const char* json_text,
                                      const char* base_dir,
                                      rsabc_config** out) {
    if (!json_text || !out) return arg_error("null argument");
    *out = nullptr;
    return guarded([&] {
        auto* handle = new rsabc_config{rsabc::parse_config_string(
            json_text, base_dir ? base_dir : "")};
        *out = handle;
    });
}

void rsabc_config_free(rsabc_config* cfg) { delete cfg; }

rsabc_status rsabc_config_set_seed(rsabc_config* cfg, uint64_t seed) {
    if (!cfg) return arg_error("null config");
    cfg->cfg.seed = seed;
    return RSABC_OK;
}

rsabc_status rsabc_config_set_output_dir(rsabc_config* cfg, const char* dir) {
    if (!cfg || !dir || !*dir) return arg_error("null or empty output dir");
    cfg->cfg.output_dir = dir;
    return RSABC_OK;
}

uint64_t rsabc_config_seed(const rsabc_config* cfg) {
    return cfg ? cfg->cfg.seed : 0;
}

const char* rsabc_config_output_dir(const rsabc_config* cfg) {
    return cfg ? cfg->cfg.output_dir.c_str() : "";
}

const char* rsabc_config_name(const rsabc_config* cfg) {
    return cfg ? cfg->cfg.name.c_str() : "";
}

uint64_t rsabc_derive_seed(uint64_t master_seed, uint64_t index) {
    return rsabc::RandomStream(master_seed, 1000 + index).next_u64();
}

rsabc_status rsabc_run(const rsabc_config* cfg, rsabc_result** out) {
    if (!cfg || !out) return arg_error("null argument");
    *out = nullptr;
    return guarded([&] {
        auto* handle = new rsabc_result{rsabc::run_experiment(cfg->cfg)};
        *out = handle;
    });
}

rsabc_status rsabc_sweep(const rsabc_config* cfg, double lo, double hi,
                         size_t n_points, size_t n_reps, rsabc_result** out) {
    if (!cfg || !out) return arg_error("null argument");
    *out = nullptr;
    return guarded([&] {
        rsabc::SweepSettings settings;
        settings.lo = lo;
        settings.hi = hi;
        if (n_points > 0) settings.n_points = n_points;
        if (n_reps > 0) settings.n_reps = n_reps;
        auto* handle =
            new rsabc_result{rsabc::run_sweep(cfg->cfg, settings)};
        *out = handle;
    });
}

void rsabc_result_free(rsabc_result* res) { delete res; }

const char* rsabc_result_output_dir(const rsabc_result* res) {
    return res ? res->art.output_dir.c_str() : "";
}

const char* rsabc_result_chain_path(const rsabc_result* res) {
    return res ? res->art.chain_path.c_str() : "";
}

const char* rsabc_result_diagnostics_path(const rsabc_result* res) {
    return res ? res->art.diagnostics_path.c_str() : "";
}

const char* rsabc_result_sweep_path(const rsabc_result* res) {
    return res ? res->art.sweep_path.c_str() : "";
}

rsabc_status rsabc_diagnose_chain_file(const char* chain_path, size_t discard,
                                       const char* out_path,
                                       double* out_worst_ess) {
    if (!chain_path) return arg_error("null chain path");
    return guarded([&] {
        rsabc::Chain chain = rsabc::load_chain_file(chain_path);
        rsabc::ChainDiagnostics d = rsabc::diagnose_chain(chain, discard);
        if (out_worst_ess) *out_worst_ess = d.worst_ess;
        if (out_path) {
            nlohmann::ordered_json j;
            j["chain"] = chain_path;
            j["n_iterations"] = chain.size();
            j["discard"] = discard;
            j["acceptance_rate"] = chain.acceptance_rate;
            nlohmann::ordered_json iat_arr = nlohmann::ordered_json::array();
            nlohmann::ordered_json ess_arr = nlohmann::ordered_json::array();
            for (double v : d.iat_per_coordinate) iat_arr.push_back(v);
            for (double v : d.ess_per_coordinate) ess_arr.push_back(v);
            j["iat"] = iat_arr;
            j["ess"] = ess_arr;
            j["worst_iat"] = d.worst_iat;
            j["worst_ess"] = d.worst_ess;
            std::ofstream outf(out_path, std::ios::binary);
            rsabc::require(outf.good(), rsabc::ErrorCode::io,
                           std::string("cannot write ") + out_path);
            outf << j.dump(2) << "\n";
        }
    });
}

}  // extern "C"
