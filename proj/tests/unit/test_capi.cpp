// Licensed under the Apache License 2.0 (see LICENSE file).

// Exercises the shared-library C interface the way an FFI consumer would:
// this file is compiled into its own binary linked against libmstvtp only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "mstvtp/mstvtp.h"

TEST_CASE("version and error surface") {
  CHECK(std::strlen(mstvtp_version()) > 0);
  mstvtp_model* m = nullptr;
  CHECK(mstvtp_dgp_preset(42, &m) == MSTVTP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(mstvtp_last_error()).find("1..9") != std::string::npos);
  CHECK(m == nullptr);
}

TEST_CASE("preset, simulate, filter, classify through handles") {
  mstvtp_model* model = nullptr;
  REQUIRE(mstvtp_dgp_preset(1, &model) == MSTVTP_OK);
  CHECK(mstvtp_model_k(model) == 2);
  CHECK(mstvtp_model_param_count(model) == 5);
  CHECK(mstvtp_model_dynamics(model) == MSTVTP_DYN_CONSTANT);

  double P[4];
  REQUIRE(mstvtp_model_transition_matrix(model, P) == MSTVTP_OK);
  CHECK(P[0] == doctest::Approx(0.80).epsilon(1e-12));
  CHECK(P[3] == doctest::Approx(0.90).epsilon(1e-12));

  mstvtp_sim_result* sim = nullptr;
  REQUIRE(mstvtp_simulate(model, 400, 100, 7, &sim) == MSTVTP_OK);
  CHECK(mstvtp_sim_length(sim) == 400);
  const int* z = mstvtp_sim_z(sim);
  for (int t = 0; t < 400; ++t) CHECK((z[t] == 1 || z[t] == 2));
  CHECK(mstvtp_sim_x(sim) == nullptr);

  mstvtp_dataset* data = nullptr;
  REQUIRE(mstvtp_sim_to_dataset(sim, &data) == MSTVTP_OK);
  CHECK(mstvtp_dataset_length(data) == 400);

  mstvtp_filter_result* flt = nullptr;
  REQUIRE(mstvtp_filter(model, data, 10, &flt) == MSTVTP_OK);
  CHECK(mstvtp_filter_t_len(flt) == 400);
  CHECK(mstvtp_filter_k(flt) == 2);
  CHECK(std::isfinite(mstvtp_filter_loglik(flt)));
  CHECK(mstvtp_filter_degenerate(flt) == 0);
  const double* xf = mstvtp_filter_xi_filt(flt);
  for (int t = 0; t < 400; ++t)
    CHECK(xf[2 * t] + xf[2 * t + 1] == doctest::Approx(1.0).epsilon(1e-10));

  std::vector<int> regime(400);
  REQUIRE(mstvtp_filter_classify(flt, regime.data()) == MSTVTP_OK);
  for (int r : regime) CHECK((r == 1 || r == 2));

  double fm[4];
  REQUIRE(mstvtp_forecast_metrics(flt, data, 10, fm) == MSTVTP_OK);
  CHECK(fm[0] > 0.0);
  CHECK(fm[1] >= fm[0] * fm[0]);  // Jensen

  mstvtp_filter_free(flt);
  mstvtp_dataset_free(data);
  mstvtp_sim_free(sim);
  mstvtp_model_free(model);
}

TEST_CASE("fit round trip with json") {
  mstvtp_model* truth = nullptr;
  REQUIRE(mstvtp_dgp_preset(1, &truth) == MSTVTP_OK);
  mstvtp_sim_result* sim = nullptr;
  REQUIRE(mstvtp_simulate(truth, 400, 100, 99, &sim) == MSTVTP_OK);
  mstvtp_dataset* data = nullptr;
  REQUIRE(mstvtp_sim_to_dataset(sim, &data) == MSTVTP_OK);

  mstvtp_fit_result* fit = nullptr;
  REQUIRE(mstvtp_fit(data, 2, 1, 1, MSTVTP_DYN_CONSTANT, 5, 3, 10, 2, &fit) ==
          MSTVTP_OK);
  CHECK(mstvtp_fit_converged(fit) == 1);
  CHECK(mstvtp_fit_n_starts_converged(fit) >= 1);
  double ll = mstvtp_fit_loglik(fit);
  CHECK(mstvtp_fit_aic(fit) == doctest::Approx(2.0 * 5 - 2.0 * ll).epsilon(1e-10));

  char* json = nullptr;
  REQUIRE(mstvtp_fit_to_json(fit, &json) == MSTVTP_OK);
  std::string doc(json);
  mstvtp_string_free(json);
  for (const char* field : {"params_hat", "se", "loglik", "aic", "bic",
                            "n_params", "converged", "n_starts_converged",
                            "best_start_index"})
    CHECK(doc.find(field) != std::string::npos);

  // the fitted model feeds back into the filter
  mstvtp_model* fitted = nullptr;
  REQUIRE(mstvtp_fit_model(fit, &fitted) == MSTVTP_OK);
  mstvtp_filter_result* flt = nullptr;
  REQUIRE(mstvtp_filter(fitted, data, 10, &flt) == MSTVTP_OK);
  CHECK(mstvtp_filter_loglik(flt) == doctest::Approx(ll).epsilon(1e-10));

  // model json round trip
  char* mjson = nullptr;
  REQUIRE(mstvtp_model_to_json(fitted, &mjson) == MSTVTP_OK);
  mstvtp_model* back = nullptr;
  REQUIRE(mstvtp_model_from_json(mjson, &back) == MSTVTP_OK);
  CHECK(mstvtp_model_k(back) == 2);
  mstvtp_string_free(mjson);

  mstvtp_model_free(back);
  mstvtp_filter_free(flt);
  mstvtp_model_free(fitted);
  mstvtp_fit_free(fit);
  mstvtp_dataset_free(data);
  mstvtp_sim_free(sim);
  mstvtp_model_free(truth);
}

TEST_CASE("dataset validation errors cross the boundary with codes") {
  std::vector<double> y = {1.0, 2.0, std::nan("")};
  mstvtp_dataset* d = nullptr;
  CHECK(mstvtp_dataset_create(y.data(), 3, nullptr, &d) == MSTVTP_ERR_NONFINITE);
  CHECK(mstvtp_dataset_from_csv("/nonexistent/file.csv", &d) == MSTVTP_ERR_IO);
}

TEST_CASE("custom model construction and profile") {
  mstvtp_model* m = nullptr;
  REQUIRE(mstvtp_model_create(2, 1, 1, MSTVTP_DYN_CONSTANT, &m) == MSTVTP_OK);
  double mu[2] = {-1.0, 1.0};
  double s2[1] = {0.5};
  double f0[2] = {1.386294361119891, 2.197224577336220};
  REQUIRE(mstvtp_model_set_params(m, mu, 2, s2, 1, f0, 2, nullptr, 0, nullptr,
                                  0) == MSTVTP_OK);
  mstvtp_sim_result* sim = nullptr;
  REQUIRE(mstvtp_simulate(m, 250, 50, 5, &sim) == MSTVTP_OK);
  mstvtp_dataset* data = nullptr;
  REQUIRE(mstvtp_sim_to_dataset(sim, &data) == MSTVTP_OK);

  const char* dims[1] = {"mu1"};
  double grid[3] = {-1.3, -1.0, -0.7};
  double values[3];
  REQUIRE(mstvtp_profile(data, m, dims, 1, grid, 3, 10, values) == MSTVTP_OK);
  for (double v : values) CHECK(std::isfinite(v));
  CHECK(values[1] >= values[0] - 1e-6);

  // invalid sigma2 rejected with a domain error
  double bad_s2[1] = {-0.5};
  CHECK(mstvtp_model_set_params(m, mu, 2, bad_s2, 1, f0, 2, nullptr, 0, nullptr,
                                0) == MSTVTP_ERR_DOMAIN);

  mstvtp_dataset_free(data);
  mstvtp_sim_free(sim);
  mstvtp_model_free(m);
}
