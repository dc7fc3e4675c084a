// Exercises the shared library the way an external client would: only the C
// header, no internal C++ types.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "rsabc/rsabc.h"

namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / "rsabc_unit_capi" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string mini_config(const std::string& out_dir) {
    return std::string(R"({
        "model": "gaussian",
        "seed": 3,
        "output_dir": ")") +
           out_dir + R"(",
        "theta_true": [0.0],
        "init": [0.0],
        "model_options": {"n_obs": 100},
        "proposal": {"sd": [0.05]},
        "stages": [{"sampler": "pm", "n_iter": 60, "m": 10, "delta": 0.1}]
    })";
}

}  // namespace

TEST_CASE("version and error state") {
    const char* v = rsabc_version();
    REQUIRE(v != nullptr);
    CHECK(std::strlen(v) >= 5);  // x.y.z
    CHECK(std::string(rsabc_last_error()).empty());
}

TEST_CASE("config load failures set status and message") {
    rsabc_config* cfg = nullptr;
    rsabc_status st = rsabc_config_load_string("{\"model\": \"gausian\"}",
                                               nullptr, &cfg);
    CHECK(st == RSABC_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::string(rsabc_last_error()).find("model") != std::string::npos);

    st = rsabc_config_load("/nonexistent/config.json", &cfg);
    CHECK(st != RSABC_OK);
    CHECK(cfg == nullptr);

    st = rsabc_config_load_string(nullptr, nullptr, &cfg);
    CHECK(st != RSABC_OK);
}

TEST_CASE("config accessors and overrides") {
    std::string out = fresh_dir("accessors");
    rsabc_config* cfg = nullptr;
    REQUIRE(rsabc_config_load_string(mini_config(out).c_str(), nullptr, &cfg) ==
            RSABC_OK);
    REQUIRE(cfg != nullptr);
    CHECK(std::string(rsabc_last_error()).empty());  // success clears it
    CHECK(rsabc_config_seed(cfg) == 3);
    CHECK(std::string(rsabc_config_output_dir(cfg)) == out);
    CHECK(std::strlen(rsabc_config_name(cfg)) > 0);

    CHECK(rsabc_config_set_seed(cfg, 99) == RSABC_OK);
    CHECK(rsabc_config_seed(cfg) == 99);
    std::string other = fresh_dir("accessors_b");
    CHECK(rsabc_config_set_output_dir(cfg, other.c_str()) == RSABC_OK);
    CHECK(std::string(rsabc_config_output_dir(cfg)) == other);
    CHECK(rsabc_config_set_output_dir(nullptr, "x") != RSABC_OK);
    rsabc_config_free(cfg);
    rsabc_config_free(nullptr);  // tolerated
}

TEST_CASE("derived replicate seeds are deterministic and distinct") {
    uint64_t a0 = rsabc_derive_seed(42, 0);
    uint64_t a0b = rsabc_derive_seed(42, 0);
    uint64_t a1 = rsabc_derive_seed(42, 1);
    uint64_t b0 = rsabc_derive_seed(43, 0);
    CHECK(a0 == a0b);
    CHECK(a0 != a1);
    CHECK(a0 != b0);
}

TEST_CASE("run produces artifacts reachable through the handle") {
    std::string out = fresh_dir("run");
    rsabc_config* cfg = nullptr;
    REQUIRE(rsabc_config_load_string(mini_config(out).c_str(), nullptr, &cfg) ==
            RSABC_OK);
    rsabc_result* res = nullptr;
    REQUIRE(rsabc_run(cfg, &res) == RSABC_OK);
    REQUIRE(res != nullptr);
    CHECK(std::string(rsabc_result_output_dir(res)) == out);
    std::string chain = rsabc_result_chain_path(res);
    std::string diag = rsabc_result_diagnostics_path(res);
    CHECK(fs::exists(chain));
    CHECK(fs::exists(diag));
    CHECK(std::string(rsabc_result_sweep_path(res)).empty());  // not a sweep

    // standalone re-diagnosis of the stored chain
    double worst_ess = 0.0;
    std::string report = out + "/rediag.json";
    CHECK(rsabc_diagnose_chain_file(chain.c_str(), 10, report.c_str(),
                                    &worst_ess) == RSABC_OK);
    CHECK(worst_ess >= 1.0);
    CHECK(fs::exists(report));
    CHECK(rsabc_diagnose_chain_file("/nonexistent/chain.txt", 0, nullptr,
                                    nullptr) != RSABC_OK);
    CHECK(std::strlen(rsabc_last_error()) > 0);

    rsabc_result_free(res);
    rsabc_config_free(cfg);
}

TEST_CASE("sweep through the c interface") {
    std::string out = fresh_dir("sweep");
    rsabc_config* cfg = nullptr;
    REQUIRE(rsabc_config_load_string(mini_config(out).c_str(), nullptr, &cfg) ==
            RSABC_OK);
    rsabc_result* res = nullptr;
    REQUIRE(rsabc_sweep(cfg, -0.1, 0.1, 3, 5, &res) == RSABC_OK);
    std::string path = rsabc_result_sweep_path(res);
    REQUIRE(!path.empty());
    CHECK(fs::exists(path));
    CHECK(std::string(rsabc_result_chain_path(res)).empty());
    rsabc_result_free(res);

    // invalid grid surfaces as a status, not a crash
    CHECK(rsabc_sweep(cfg, 0.1, -0.1, 3, 5, &res) != RSABC_OK);
    rsabc_config_free(cfg);
}

TEST_CASE("startup failures map to their own status") {
    std::string out = fresh_dir("startup");
    // indicator kernel at an impossible threshold: no valid initial state
    std::string text = std::string(R"({
        "model": "gaussian",
        "seed": 3,
        "output_dir": ")") + out + R"(",
        "theta_true": [0.0],
        "init": [0.0],
        "model_options": {"n_obs": 100},
        "kernel": "indicator",
        "stages": [{"sampler": "pm", "n_iter": 20, "m": 5, "delta": 1e-12}]
    })";
    rsabc_config* cfg = nullptr;
    REQUIRE(rsabc_config_load_string(text.c_str(), nullptr, &cfg) == RSABC_OK);
    rsabc_result* res = nullptr;
    CHECK(rsabc_run(cfg, &res) == RSABC_ERR_STARTUP);
    CHECK(res == nullptr);
    CHECK(std::strlen(rsabc_last_error()) > 0);
    rsabc_config_free(cfg);
}
