// Licensed under the Apache License 2.0 (see LICENSE file).

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mstvtp/estimate.hpp"
#include "mstvtp/metrics.hpp"
#include "mstvtp/rng.hpp"
#include "mstvtp/simulate.hpp"

using namespace mstvtp;

TEST_CASE("label alignment picks the deviation-minimizing permutation") {
  CHECK(align_labels({0.9, -1.1}, {-1.0, 1.0}) == std::vector<int>{1, 0});
  CHECK(align_labels({-1.0, 1.0}, {-1.0, 1.0}) == std::vector<int>{0, 1});
  CHECK(align_labels({-2.1, 1.9, 0.05}, {-2.0, 0.0, 2.0}) ==
        std::vector<int>{0, 2, 1});
}

TEST_CASE("alignment is optimal against exhaustive comparison") {
  Rng rng(4242);
  for (int rep = 0; rep < 50; ++rep) {
    int k = 2 + rep % 3;  // 2..4
    std::vector<double> mu_hat(k), mu_true(k);
    for (double& v : mu_hat) v = rng.normal(0.0, 2.0);
    for (double& v : mu_true) v = rng.normal(0.0, 2.0);
    auto best = align_labels(mu_hat, mu_true);
    double best_cost = 0.0;
    for (int i = 0; i < k; ++i) best_cost += std::abs(mu_hat[best[i]] - mu_true[i]);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double cost = 0.0;
      for (int i = 0; i < k; ++i) cost += std::abs(mu_hat[perm[i]] - mu_true[i]);
      CHECK(best_cost <= cost + 1e-12);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("log-likelihood is invariant under label permutation") {
  Rng rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    auto [spec, pr] = dgp_preset(rep % 2 == 0 ? 7 : 2);
    auto sim = simulate(spec, pr, 150, 50, 1000 + rep);
    Dataset data;
    data.y = sim.y;

    std::vector<int> perm(spec.k);
    std::iota(perm.begin(), perm.end(), 0);
    for (int s = 0; s < 3; ++s)
      std::swap(perm[rng.uniform_int(spec.k)], perm[rng.uniform_int(spec.k)]);

    Params permuted = apply_permutation(pr, spec, perm);
    auto base = run_filter(data, spec, pr, 10);
    auto alt = run_filter(data, spec, permuted, 10);
    CHECK(base.loglik == doctest::Approx(alt.loglik).epsilon(1e-10));
  }
}

TEST_CASE("permutation round trip restores the original parameters") {
  auto [spec, pr] = dgp_preset(9);
  std::vector<int> perm = {2, 0, 1};
  std::vector<int> inv(3);
  for (int i = 0; i < 3; ++i) inv[perm[i]] = i;
  Params once = apply_permutation(pr, spec, perm);
  Params back = apply_permutation(once, spec, inv);
  CHECK(back.mu == pr.mu);
  CHECK(back.sigma2 == pr.sigma2);
  for (size_t i = 0; i < pr.f0.size(); ++i)
    CHECK(back.f0[i] == doctest::Approx(pr.f0[i]).epsilon(1e-15));
  CHECK(back.a == pr.a);
}

TEST_CASE("recovery metrics arithmetic") {
  ModelSpec spec;
  spec.k = 1;
  spec.dynamics = Dynamics::Constant;
  Params truth;
  truth.mu = {2.0};
  truth.sigma2 = {1.0};

  std::vector<RepEstimate> reps(3);
  double vals[3] = {1.0, 2.0, 3.0};
  for (int i = 0; i < 3; ++i) {
    reps[i].params.mu = {vals[i]};
    reps[i].params.sigma2 = {1.0};
    reps[i].se = {0.05, 0.1};
  }
  auto rows = recovery_metrics(reps, truth, spec, 10.0);
  REQUIRE(rows.size() == 2);  // mu, sigma2 (no transition params for k=1)
  CHECK(rows[0].group == ParamGroup::Mu);
  CHECK(rows[0].bias == doctest::Approx(0.0));
  CHECK(rows[0].rmse == doctest::Approx(std::sqrt(2.0 / 3.0)));
  // mu CI of width 1.96*0.05 covers only the middle replication
  CHECK(rows[0].coverage == doctest::Approx(1.0 / 3.0));
  CHECK(rows[0].n_used == 3);
}

TEST_CASE("wald interval coverage example") {
  //  0.75 +/- 1.96*0.05 = [0.652, 0.848] covers 0.8
  CHECK(std::abs(0.75 - 0.8) <= 1.96 * 0.05);
}

TEST_CASE("extreme dynamic coefficients are trimmed from the A group only") {
  auto [spec, truth] = dgp_preset(2);
  std::vector<RepEstimate> reps(4);
  for (int i = 0; i < 4; ++i) {
    reps[i].params = truth;
    reps[i].pi0 = pi0_values(truth, spec);
  }
  reps[2].params.theta = {25.0, -0.1};  // optimizer breakdown
  auto rows = recovery_metrics(reps, truth, spec, 10.0);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].n_used == 4);  // mu keeps every replication
  CHECK(rows[3].group == ParamGroup::A);
  CHECK(rows[3].n_used == 3);
  CHECK(rows[3].bias == doctest::Approx(0.0));
}

TEST_CASE("forecast metric definitions") {
  FilterOutput out;
  out.t_len = 2;
  out.k = 3;
  out.xi_pred = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  out.pred_mean = {-2.0, -2.0};
  out.pred_var = {4.0, 4.0};
  std::vector<double> y = {-2.0, 0.0};
  auto fm = forecast_metrics(out, y, 0);
  CHECK(fm.mafe == doctest::Approx(1.0));          // (0 + 2) / 2
  CHECK(fm.msfe == doctest::Approx(2.0));          // (0 + 4) / 2
  CHECK(fm.masfe == doctest::Approx(0.5));         // (0 + 2/2) / 2
  CHECK(fm.mssfe == doctest::Approx(0.5));         // (0 + 4/4) / 2
}

TEST_CASE("predictive variance of an even two-regime mixture") {
  ModelSpec spec{2, Parameterization::Diagonal, VarianceStructure::Common,
                 Dynamics::Constant};
  Params pr;
  pr.mu = {-1.0, 1.0};
  pr.sigma2 = {0.5};
  pr.f0 = {0.0, 0.0};
  Dataset data;
  data.y = {0.3, -0.2, 0.5};
  auto out = run_filter(data, spec, pr, 0);
  for (int t = 0; t < 3; ++t)
    CHECK(out.pred_var[t] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("standardized forecast error of a near-single-regime model") {
  // With indistinguishable regimes the predictive density is one gaussian,
  // so MASFE estimates E|Z| = sqrt(2/pi).
  ModelSpec spec{2, Parameterization::Diagonal, VarianceStructure::Common,
                 Dynamics::Constant};
  Params pr;
  pr.mu = {0.0, 1e-4};
  pr.sigma2 = {1.0};
  pr.f0 = {1.0, 1.0};
  auto sim = simulate(spec, pr, 10000, 100, 2024);
  Dataset data;
  data.y = sim.y;
  auto out = run_filter(data, spec, pr, 0);
  auto fm = forecast_metrics(out, data.y, 0);
  CHECK(std::abs(fm.masfe - std::sqrt(2.0 / M_PI)) < 0.05);
}

TEST_CASE("filtered probability accuracy arithmetic") {
  std::vector<double> base(5 * 4);
  for (size_t i = 0; i < base.size(); ++i) base[i] = 0.25;
  auto same = filtered_prob_accuracy(base, base);
  CHECK(same.first == doctest::Approx(0.0));
  CHECK(same.second == doctest::Approx(0.0));

  std::vector<double> off = base;
  for (int t = 0; t < 5; ++t) off[t * 4] += 0.1;  // one element per slice
  auto acc = filtered_prob_accuracy(off, base);
  CHECK(acc.first == doctest::Approx(0.01 / 4).epsilon(1e-12));
  CHECK(acc.second == doctest::Approx(0.1 / 4).epsilon(1e-12));

  std::vector<double> bad(3, 0.0);
  CHECK_THROWS_AS((void)filtered_prob_accuracy(bad, base), Error);
}

TEST_CASE("profile likelihood basics on a small constant model") {
  auto [spec, truth] = dgp_preset(1);
  auto sim = simulate(spec, truth, 250, 100, 31);
  Dataset data;
  data.y = sim.y;
  auto est = estimate(data, spec, 5, 3, 10);
  REQUIRE(est.converged);

  // degenerate one-point grid at a non-optimal value is bounded by the MLE
  auto fixed = profile_loglik(data, spec, est.params_hat, {"mu1"},
                              {{est.params_hat.mu[0] + 0.3}}, 10);
  REQUIRE(fixed.values.size() == 1);
  CHECK(std::isfinite(fixed.values[0]));
  CHECK(fixed.values[0] <= est.loglik + 1e-6);

  // profiling at the MLE coordinate reproduces the full maximum
  auto at_mle = profile_loglik(data, spec, est.params_hat, {"mu1"},
                               {{est.params_hat.mu[0]}}, 10);
  CHECK(at_mle.values[0] == doctest::Approx(est.loglik).epsilon(1e-5));

  // a coarse scan over mu1 is unimodal with an interior maximum near the MLE
  std::vector<std::vector<double>> grid;
  for (double v = -1.6; v <= -0.41; v += 0.2) grid.push_back({v});
  auto prof = profile_loglik(data, spec, est.params_hat, {"mu1"}, grid, 10);
  size_t arg = 0;
  for (size_t i = 0; i < prof.values.size(); ++i)
    if (prof.values[i] > prof.values[arg]) arg = i;
  CHECK(arg > 0);
  CHECK(arg + 1 < prof.values.size());
  CHECK(std::abs(grid[arg][0] - est.params_hat.mu[0]) < 0.25);

  CHECK_THROWS_AS((void)profile_loglik(data, spec, est.params_hat,
                                       {"nosuch"}, {{0.0}}, 10),
                  Error);
}
