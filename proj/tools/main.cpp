// Experiment runner. Talks to the toolkit exclusively through the C API so
// the shared library surface stays exercised end to end.
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "rsabc/rsabc.h"

namespace {

int exit_code(rsabc_status s) { return static_cast<int>(s); }

void report_failure(const std::string& what, rsabc_status s) {
    std::fprintf(stderr, "%s failed (status %d):\n%s\n", what.c_str(),
                 static_cast<int>(s), rsabc_last_error());
}

struct ConfigHandle {
    rsabc_config* ptr = nullptr;
    ~ConfigHandle() { rsabc_config_free(ptr); }
};

struct ResultHandle {
    rsabc_result* ptr = nullptr;
    ~ResultHandle() { rsabc_result_free(ptr); }
};

rsabc_status load_with_overrides(const std::string& path, uint64_t seed,
                                 bool seed_set, const std::string& out_dir,
                                 ConfigHandle& handle) {
    rsabc_status s = rsabc_config_load(path.c_str(), &handle.ptr);
    if (s != RSABC_OK) return s;
    if (seed_set) rsabc_config_set_seed(handle.ptr, seed);
    if (!out_dir.empty())
        return rsabc_config_set_output_dir(handle.ptr, out_dir.c_str());
    return RSABC_OK;
}

int cmd_run(const std::string& path, uint64_t seed, bool seed_set,
            const std::string& out_dir) {
    ConfigHandle cfg;
    rsabc_status s = load_with_overrides(path, seed, seed_set, out_dir, cfg);
    if (s != RSABC_OK) {
        report_failure("config", s);
        return exit_code(s);
    }
    ResultHandle res;
    s = rsabc_run(cfg.ptr, &res.ptr);
    if (s != RSABC_OK) {
        report_failure("run", s);
        return exit_code(s);
    }
    std::printf("run %s complete\n", rsabc_config_name(cfg.ptr));
    std::printf("  output: %s\n", rsabc_result_output_dir(res.ptr));
    if (*rsabc_result_chain_path(res.ptr))
        std::printf("  chain: %s\n", rsabc_result_chain_path(res.ptr));
    if (*rsabc_result_diagnostics_path(res.ptr))
        std::printf("  diagnostics: %s\n",
                    rsabc_result_diagnostics_path(res.ptr));
    return 0;
}

int cmd_sweep(const std::string& path, double lo, double hi, size_t points,
              size_t reps, uint64_t seed, bool seed_set,
              const std::string& out_dir) {
    ConfigHandle cfg;
    rsabc_status s = load_with_overrides(path, seed, seed_set, out_dir, cfg);
    if (s != RSABC_OK) {
        report_failure("config", s);
        return exit_code(s);
    }
    ResultHandle res;
    s = rsabc_sweep(cfg.ptr, lo, hi, points, reps, &res.ptr);
    if (s != RSABC_OK) {
        report_failure("sweep", s);
        return exit_code(s);
    }
    std::printf("sweep %s complete\n", rsabc_config_name(cfg.ptr));
    std::printf("  table: %s\n", rsabc_result_sweep_path(res.ptr));
    return 0;
}

int cmd_batch(const std::string& path, size_t replicates, size_t jobs) {
    if (replicates == 0) {
        std::fprintf(stderr, "batch needs at least one replicate\n");
        return 2;
    }
    ConfigHandle probe;
    rsabc_status s = rsabc_config_load(path.c_str(), &probe.ptr);
    if (s != RSABC_OK) {
        report_failure("config", s);
        return exit_code(s);
    }
    uint64_t master = rsabc_config_seed(probe.ptr);
    std::string base_dir = rsabc_config_output_dir(probe.ptr);

    if (jobs == 0) jobs = std::thread::hardware_concurrency();
    if (jobs == 0) jobs = 1;
    if (jobs > replicates) jobs = replicates;

    std::vector<rsabc_status> statuses(replicates, RSABC_OK);
    std::vector<std::string> messages(replicates);
    std::mutex mu;
    size_t next = 0;
    auto worker = [&] {
        for (;;) {
            size_t i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= replicates) return;
                i = next++;
            }
            ConfigHandle cfg;
            rsabc_status rs = rsabc_config_load(path.c_str(), &cfg.ptr);
            if (rs == RSABC_OK) {
                rsabc_config_set_seed(cfg.ptr,
                                      rsabc_derive_seed(master, i));
                std::string dir = base_dir + "/rep" + std::to_string(i);
                rs = rsabc_config_set_output_dir(cfg.ptr, dir.c_str());
            }
            ResultHandle res;
            if (rs == RSABC_OK) rs = rsabc_run(cfg.ptr, &res.ptr);
            std::lock_guard<std::mutex> lock(mu);
            statuses[i] = rs;
            messages[i] = rs == RSABC_OK
                              ? rsabc_result_output_dir(res.ptr)
                              : rsabc_last_error();
        }
    };
    std::vector<std::thread> pool;
    for (size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    int worst = 0;
    for (size_t i = 0; i < replicates; ++i) {
        if (statuses[i] == RSABC_OK) {
            std::printf("rep %zu: ok %s\n", i, messages[i].c_str());
        } else {
            std::printf("rep %zu: failed (status %d) %s\n", i,
                        static_cast<int>(statuses[i]), messages[i].c_str());
            if (worst == 0) worst = exit_code(statuses[i]);
        }
    }
    return worst;
}

int cmd_diag(const std::string& chain, size_t discard,
             const std::string& out) {
    double worst_ess = 0.0;
    rsabc_status s = rsabc_diagnose_chain_file(
        chain.c_str(), discard, out.empty() ? nullptr : out.c_str(),
        &worst_ess);
    if (s != RSABC_OK) {
        report_failure("diag", s);
        return exit_code(s);
    }
    std::printf("worst_ess %.6g\n", worst_ess);
    if (!out.empty()) std::printf("  report: %s\n", out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Likelihood-free inference experiment runner"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rsabc_version()));

    std::string config_path, out_dir, chain_path, diag_out;
    uint64_t seed = 0;
    bool seed_set = false;
    double lo = -0.1, hi = 0.1;
    size_t points = 0, reps = 0, replicates = 1, jobs = 0, discard = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--seed", seed, "override the master seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--out", out_dir, "override the output directory");
    };

    CLI::App* run = app.add_subcommand("run", "run the configured experiment");
    add_common(run);

    CLI::App* sweep =
        app.add_subcommand("sweep", "tabulate likelihood estimates on a grid");
    add_common(sweep);
    sweep->add_option("--lo", lo, "grid lower end");
    sweep->add_option("--hi", hi, "grid upper end");
    sweep->add_option("--points", points, "grid size (default 50)");
    sweep->add_option("--reps", reps, "replications per point (default 1000)");

    CLI::App* batch =
        app.add_subcommand("batch", "run independent replicate seeds");
    batch->add_option("config", config_path, "experiment config (JSON)")
        ->required();
    batch->add_option("--replicates", replicates, "number of replicates")
        ->required();
    batch->add_option("--jobs", jobs, "max concurrent runs (default: cores)");

    CLI::App* diag = app.add_subcommand("diag", "diagnostics for a chain file");
    diag->add_option("chain", chain_path, "chain file")->required();
    diag->add_option("--discard", discard, "burn-in rows to drop");
    diag->add_option("--out", diag_out, "write a JSON report here");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, seed, seed_set, out_dir);
    if (sweep->parsed())
        return cmd_sweep(config_path, lo, hi, points, reps, seed, seed_set,
                         out_dir);
    if (batch->parsed()) return cmd_batch(config_path, replicates, jobs);
    if (diag->parsed()) return cmd_diag(chain_path, discard, diag_out);
    return 0;
}
