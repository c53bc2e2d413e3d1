#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "pursuit/pursuit.h"

using nlohmann::json;

TEST_CASE("dataset lifecycle through the c api") {
    pv_planted_spec spec{};
    spec.d = 8;
    spec.signal = PV_SIGNAL_IMBALANCED_CLUSTERS;
    spec.p = 0.2;
    spec.ambient = PV_AMBIENT_GAUSSIAN;

    pv_dataset* data = nullptr;
    REQUIRE(pv_dataset_planted(&spec, 100, 42, &data) == PV_OK);
    CHECK(pv_dataset_rows(data) == 100);
    CHECK(pv_dataset_dim(data) == 8);
    CHECK(pv_dataset_has_labels(data) == 0);
    REQUIRE(pv_dataset_has_true_direction(data) == 1);

    std::vector<double> u(8);
    REQUIRE(pv_dataset_true_direction(data, u.data()) == PV_OK);
    double norm = 0.0;
    for (double x : u) norm += x * x;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));

    const char* path = "/tmp/pursuit_capi_roundtrip.csv";
    REQUIRE(pv_dataset_save_csv(data, path) == PV_OK);
    pv_dataset* loaded = nullptr;
    REQUIRE(pv_dataset_load_csv(path, &loaded) == PV_OK);
    CHECK(pv_dataset_rows(loaded) == 100);
    CHECK(pv_dataset_dim(loaded) == 8);
    pv_dataset_free(loaded);
    std::remove(path);
    pv_dataset_free(data);
}

TEST_CASE("error reporting carries status and message") {
    pv_dataset* data = nullptr;
    CHECK(pv_dataset_load_csv("/tmp/pursuit_capi_missing.csv", &data) == PV_ERR_IO);
    CHECK(std::strlen(pv_last_error()) > 0);

    pv_planted_spec spec{};
    spec.d = 8;
    spec.p = 1.5;  // invalid
    CHECK(pv_dataset_planted(&spec, 10, 0, &data) == PV_ERR_INVALID);
    CHECK(std::string(pv_last_error()).find("p must") != std::string::npos);
}

TEST_CASE("two-step run through the c api") {
    pv_planted_spec spec{};
    spec.d = 16;
    spec.signal = PV_SIGNAL_IMBALANCED_CLUSTERS;
    spec.p = 0.25;
    pv_dataset* data = nullptr;
    REQUIRE(pv_dataset_planted(&spec, 4096, 7, &data) == PV_OK);

    pv_pursuit_config cfg{};
    cfg.phi = "relu2";
    cfg.strategy = PV_BATCH_AUTO;
    cfg.p_hint = 0.25;
    cfg.seed = 9;

    pv_run_result* result = nullptr;
    REQUIRE(pv_two_step(data, &cfg, &result) == PV_OK);
    CHECK(pv_run_result_dim(result) == 16);
    std::vector<double> u(16);
    REQUIRE(pv_run_result_direction(result, u.data()) == PV_OK);
    CHECK(pv_run_result_alignment(result) >= 0.0);
    CHECK(pv_run_result_alignment(result) <= 1.0);

    char* report = nullptr;
    REQUIRE(pv_run_result_report_json(result, &report) == PV_OK);
    const json doc = json::parse(report);
    CHECK(doc.contains("u_hat"));
    CHECK(doc.contains("alignment"));
    CHECK(doc.contains("score_trace"));
    pv_string_free(report);

    // Determinism: an identical rerun gives the same direction.
    pv_run_result* again = nullptr;
    REQUIRE(pv_two_step(data, &cfg, &again) == PV_OK);
    std::vector<double> v(16);
    REQUIRE(pv_run_result_direction(again, v.data()) == PV_OK);
    CHECK(u == v);
    pv_run_result_free(again);
    pv_run_result_free(result);
    pv_dataset_free(data);
}

TEST_CASE("unknown tags are rejected as invalid") {
    pv_planted_spec spec{};
    spec.d = 4;
    spec.p = 0.2;
    pv_dataset* data = nullptr;
    REQUIRE(pv_dataset_planted(&spec, 64, 1, &data) == PV_OK);

    pv_pursuit_config cfg{};
    cfg.phi = "nonsense";
    pv_run_result* result = nullptr;
    CHECK(pv_two_step(data, &cfg, &result) == PV_ERR_INVALID);

    std::vector<double> u(4);
    CHECK(pv_recover_spectral(data, "nonsense", u.data()) == PV_ERR_INVALID);
    CHECK(pv_recover_spectral(data, "cov4max", u.data()) == PV_OK);
    pv_dataset_free(data);
}

TEST_CASE("dataset transforms through the c api") {
    pv_dataset* data = nullptr;
    REQUIRE(pv_dataset_mixture_shift(500, 5, 0.3, 3.0, 1.0, 3, &data) == PV_OK);
    CHECK(pv_dataset_has_labels(data) == 1);

    pv_dataset* white = nullptr;
    REQUIRE(pv_dataset_whiten(data, &white) == PV_OK);
    CHECK(pv_dataset_dim(white) == 5);

    pv_dataset* reduced = nullptr;
    REQUIRE(pv_dataset_pca(data, 2, &reduced) == PV_OK);
    CHECK(pv_dataset_dim(reduced) == 2);

    std::vector<double> u(5, 0.0);
    u[0] = 1.0;
    pv_dataset* deflated = nullptr;
    REQUIRE(pv_dataset_deflate(data, u.data(), &deflated) == PV_OK);

    pv_dataset *head = nullptr, *tail = nullptr;
    REQUIRE(pv_dataset_split(data, 300, &head, &tail) == PV_OK);
    CHECK(pv_dataset_rows(head) == 300);
    CHECK(pv_dataset_rows(tail) == 200);
    CHECK(pv_dataset_has_labels(head) == 1);

    pv_dataset_free(head);
    pv_dataset_free(tail);
    pv_dataset_free(deflated);
    pv_dataset_free(reduced);
    pv_dataset_free(white);
    pv_dataset_free(data);
}

TEST_CASE("phase grid and comparison through the c api") {
    const int64_t d_values[] = {8};
    const int64_t n_values[] = {128, 512};
    pv_phase_spec spec{};
    spec.d_values = d_values;
    spec.num_d = 1;
    spec.n_values = n_values;
    spec.num_n = 2;
    spec.p_power_law = 0;
    spec.p_param = 0.25;
    spec.trials = 2;
    spec.method = "relu2";
    spec.signal = PV_SIGNAL_IMBALANCED_CLUSTERS;
    spec.seed = 5;
    spec.jobs = 1;

    pv_phase_result* result = nullptr;
    REQUIRE(pv_run_phase_grid(&spec, &result) == PV_OK);
    REQUIRE(pv_phase_result_cells(result) == 2);
    pv_phase_cell cell{};
    REQUIRE(pv_phase_result_cell(result, 1, &cell) == PV_OK);
    CHECK(cell.d == 8);
    CHECK(cell.n == 512);
    CHECK(cell.trials == 2);
    pv_phase_result_free(result);

    const char* methods[] = {"relu2", "cov4max"};
    pv_compare_spec cspec{};
    cspec.d = 8;
    cspec.p = 0.25;
    cspec.signal = PV_SIGNAL_IMBALANCED_CLUSTERS;
    cspec.n_values = n_values;
    cspec.num_n = 2;
    cspec.methods = methods;
    cspec.num_methods = 2;
    cspec.trials = 2;
    cspec.seed = 5;
    pv_compare_result* cresult = nullptr;
    REQUIRE(pv_run_compare(&cspec, &cresult) == PV_OK);
    REQUIRE(pv_compare_result_rows(cresult) == 4);
    pv_compare_row row{};
    REQUIRE(pv_compare_result_row(cresult, 0, &row) == PV_OK);
    CHECK(std::string(row.method) == "relu2");
    pv_compare_result_free(cresult);
}

TEST_CASE("information gain through the c api") {
    pv_dataset* train = nullptr;
    pv_dataset* holdout = nullptr;
    REQUIRE(pv_dataset_mixture_shift(400, 6, 0.5, 5.0, 1.0, 11, &train) == PV_OK);
    REQUIRE(pv_dataset_mixture_shift(200, 6, 0.5, 5.0, 1.0, 12, &holdout) == PV_OK);

    pv_ig_spec spec{};
    spec.method = "relu2";
    spec.n_init = 50;
    spec.directions = 5;
    spec.seed = 13;

    char* report = nullptr;
    REQUIRE(pv_run_ig(train, holdout, &spec, &report) == PV_OK);
    const json doc = json::parse(report);
    CHECK(doc.at("max_bits").get<double>() == doctest::Approx(1.0));
    CHECK(doc.at("projections").size() == 5);
    pv_string_free(report);
    pv_dataset_free(train);
    pv_dataset_free(holdout);
}

TEST_CASE("calibration and hypothesis test through the c api") {
    double t = 0.0;
    REQUIRE(pv_calibrate_threshold(8, 1024, 0.25, 30, 17, &t) == PV_OK);
    CHECK(t > 0.5);

    pv_planted_spec spec{};
    spec.d = 8;
    spec.p = 0.25;
    pv_dataset* data = nullptr;
    REQUIRE(pv_dataset_planted(&spec, 4096, 19, &data) == PV_OK);
    std::vector<double> u(8);
    REQUIRE(pv_dataset_true_direction(data, u.data()) == PV_OK);
    int decision = -1;
    double stat = 0.0;
    REQUIRE(pv_hypothesis_test(data, u.data(), t, &decision, &stat) == PV_OK);
    CHECK(decision == 1);
    CHECK(stat > t);
    pv_dataset_free(data);
}
