// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "mstvtp/estimate.hpp"
#include "mstvtp/json_io.hpp"
#include "mstvtp/rng.hpp"
#include "mstvtp/simulate.hpp"

namespace mstvtp {

using nlohmann::json;

namespace {
enum StreamPurpose : std::uint64_t { kData = 1, kCovariate = 2, kStarts = 3 };

int model_index(Dynamics d) { return static_cast<int>(d); }

std::string record_key(const RepRecord& r) {
  return std::to_string(r.dgp_id) + ":" + std::to_string(r.t_len) + ":" +
         to_string(r.model) + ":" + std::to_string(r.rep);
}

json record_to_json(const RepRecord& r, const ModelSpec& est_spec) {
  json j;
  j["dgp"] = r.dgp_id;
  j["T"] = r.t_len;
  j["model"] = to_string(r.model);
  j["rep"] = r.rep;
  j["converged"] = r.converged;
  j["n_starts_converged"] = r.n_starts_converged;
  j["loglik"] = r.loglik;
  j["aic"] = r.aic;
  j["bic"] = r.bic;
  if (r.converged) {
    j["params"] = params_to_json(r.aligned.params, est_spec);
    j["se"] = r.aligned.se;
    j["pi0"] = r.aligned.pi0;
    j["pi0_se"] = r.aligned.pi0_se;
    j["forecast"] = {{"mafe", r.forecast.mafe},
                     {"msfe", r.forecast.msfe},
                     {"masfe", r.forecast.masfe},
                     {"mssfe", r.forecast.mssfe}};
    if (r.has_filtprob)
      j["filtprob"] = {{"mse", r.fp_mse}, {"mae", r.fp_mae}};
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

RepRecord record_from_json(const json& j, const ModelSpec& est_spec) {
  RepRecord r;
  r.dgp_id = j.at("dgp").get<int>();
  r.t_len = j.at("T").get<int>();
  r.model = dynamics_from_string(j.at("model").get<std::string>());
  r.rep = j.at("rep").get<int>();
  r.done = true;
  r.converged = j.at("converged").get<bool>();
  r.n_starts_converged = j.at("n_starts_converged").get<int>();
  r.loglik = j.at("loglik").get<double>();
  r.aic = j.at("aic").get<double>();
  r.bic = j.at("bic").get<double>();
  if (r.converged) {
    r.aligned.params = params_from_json(j.at("params"), est_spec);
    r.aligned.se = j.value("se", std::vector<double>{});
    r.aligned.pi0 = j.value("pi0", std::vector<double>{});
    r.aligned.pi0_se = j.value("pi0_se", std::vector<double>{});
    const json& f = j.at("forecast");
    r.forecast = {f.at("mafe"), f.at("msfe"), f.at("masfe"), f.at("mssfe")};
    if (j.contains("filtprob")) {
      r.has_filtprob = true;
      r.fp_mse = j["filtprob"].at("mse").get<double>();
      r.fp_mae = j["filtprob"].at("mae").get<double>();
    }
  }
  r.error = j.value("error", "");
  return r;
}

}  // namespace

std::vector<Dynamics> estimation_models_for_dgp(int dgp_id) {
  switch (dgp_id) {
    case 1:
    case 6:
      return {Dynamics::Constant};
    case 5:
      return {Dynamics::Constant, Dynamics::LaggedObs};
    case 2:
    case 3:
    case 4:
    case 7:
    case 8:
    case 9:
      return {Dynamics::Constant, Dynamics::LaggedObs, Dynamics::Exogenous,
              Dynamics::ScoreDriven};
    default:
      fail(ErrorCode::InvalidArgument, "DGP id must be in 1..9");
  }
}

std::vector<McScenario> default_grid(std::uint64_t base_seed) {
  std::vector<McScenario> grid;
  for (int dgp = 1; dgp <= 9; ++dgp) {
    for (int T : {500, 1000}) {
      McScenario s;
      s.dgp_id = dgp;
      s.t_len = T;
      s.estimation_models = estimation_models_for_dgp(dgp);
      s.replications = 50;
      s.n_starts = 10;
      s.burn_in = 100;
      s.cutoff = 10;
      s.base_seed = base_seed;
      grid.push_back(s);
    }
  }
  return grid;
}

McResult run_scenario(const McScenario& s, int threads,
                      const std::string& jsonl_path,
                      const std::function<void(const RepRecord&)>& progress) {
  auto [true_spec, true_params] = dgp_preset(s.dgp_id);
  const int n_models = static_cast<int>(s.estimation_models.size());
  const int R = s.replications;

  McResult res;
  res.records.resize(static_cast<size_t>(R) * n_models);
  auto slot = [&](int rep, int mi) -> RepRecord& {
    return res.records[static_cast<size_t>(rep - 1) * n_models + mi];
  };
  for (int rep = 1; rep <= R; ++rep) {
    for (int mi = 0; mi < n_models; ++mi) {
      RepRecord& r = slot(rep, mi);
      r.dgp_id = s.dgp_id;
      r.t_len = s.t_len;
      r.model = s.estimation_models[mi];
      r.rep = rep;
    }
  }

  // Resume: load records already present in the JSONL file.
  std::ofstream jsonl_out;
  if (!jsonl_path.empty()) {
    std::ifstream in(jsonl_path);
    std::string line;
    while (in && std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        json j = json::parse(line);
        ModelSpec est_spec = true_spec;
        est_spec.dynamics = dynamics_from_string(j.at("model").get<std::string>());
        RepRecord r = record_from_json(j, est_spec);
        if (r.dgp_id != s.dgp_id || r.t_len != s.t_len) continue;
        for (int mi = 0; mi < n_models; ++mi) {
          if (s.estimation_models[mi] == r.model && r.rep >= 1 && r.rep <= R)
            slot(r.rep, mi) = r;
        }
      } catch (...) {
        continue;  // unparseable lines are ignored
      }
    }
    jsonl_out.open(jsonl_path, std::ios::app);
  }

  std::mutex io_mutex;
  std::atomic<int> next_rep{1};
  auto worker = [&]() {
    for (;;) {
      int rep = next_rep.fetch_add(1);
      if (rep > R) break;

      bool all_done = true;
      for (int mi = 0; mi < n_models; ++mi)
        if (!slot(rep, mi).done) all_done = false;
      if (all_done) continue;

      std::uint64_t data_seed = split_stream(
          {s.base_seed, static_cast<std::uint64_t>(s.dgp_id),
           static_cast<std::uint64_t>(s.t_len), static_cast<std::uint64_t>(rep),
           kData});
      SimOutput sim = simulate(true_spec, true_params, s.t_len, s.burn_in,
                               data_seed);

      // Independent covariate for exogenous fits on non-exogenous data.
      std::vector<double> indep_x;
      if (std::find(s.estimation_models.begin(), s.estimation_models.end(),
                    Dynamics::Exogenous) != s.estimation_models.end() &&
          true_spec.dynamics != Dynamics::Exogenous) {
        Rng cov_rng(split_stream({s.base_seed,
                                  static_cast<std::uint64_t>(s.dgp_id),
                                  static_cast<std::uint64_t>(s.t_len),
                                  static_cast<std::uint64_t>(rep), kCovariate}));
        indep_x.resize(s.t_len);
        for (double& v : indep_x) v = cov_rng.normal();
      }

      FilterOutput true_filter;  // lazily computed for filtered-prob accuracy
      bool have_true_filter = false;

      for (int mi = 0; mi < n_models; ++mi) {
        RepRecord& r = slot(rep, mi);
        if (r.done) continue;
        ModelSpec est_spec = true_spec;
        est_spec.dynamics = s.estimation_models[mi];

        Dataset data;
        data.y = sim.y;
        if (est_spec.dynamics == Dynamics::Exogenous)
          data.x = true_spec.dynamics == Dynamics::Exogenous ? sim.x : indep_x;

        std::uint64_t start_seed = split_stream(
            {s.base_seed, static_cast<std::uint64_t>(s.dgp_id),
             static_cast<std::uint64_t>(s.t_len),
             static_cast<std::uint64_t>(rep), kStarts,
             static_cast<std::uint64_t>(model_index(est_spec.dynamics))});
        try {
          EstimationResult est =
              estimate(data, est_spec, s.n_starts, start_seed, s.cutoff);
          r.converged = est.converged;
          r.n_starts_converged = est.n_starts_converged;
          r.loglik = est.loglik;
          r.aic = est.aic;
          r.bic = est.bic;
          if (est.converged) {
            std::vector<int> perm =
                align_labels(est.params_hat.mu, true_params.mu);
            Params aligned = apply_permutation(est.params_hat, est_spec, perm);
            r.aligned.params = aligned;
            r.aligned.pi0 = pi0_values(aligned, est_spec);
            if (est.se_available) {
              std::vector<int> ip = packed_index_permutation(est_spec, perm);
              r.aligned.se.resize(ip.size());
              for (size_t i = 0; i < ip.size(); ++i)
                r.aligned.se[i] = est.se[ip[i]];
              Eigen::MatrixXd cov(ip.size(), ip.size());
              for (size_t i = 0; i < ip.size(); ++i)
                for (size_t j = 0; j < ip.size(); ++j)
                  cov(i, j) = est.cov_unconstrained(ip[i], ip[j]);
              r.aligned.pi0_se = pi0_standard_errors(aligned, est_spec, cov);
            }
            FilterOutput fit_filter =
                run_filter(data, est_spec, est.params_hat, s.cutoff);
            r.forecast = forecast_metrics(fit_filter, data.y, s.cutoff);

            if (est_spec.dynamics == true_spec.dynamics) {
              if (!have_true_filter) {
                Dataset true_data;
                true_data.y = sim.y;
                if (true_spec.dynamics == Dynamics::Exogenous)
                  true_data.x = sim.x;
                true_filter =
                    run_filter(true_data, true_spec, true_params, s.cutoff);
                have_true_filter = true;
              }
              FilterOutput aligned_filter =
                  run_filter(data, est_spec, aligned, s.cutoff);
              auto [mse, mae] = filtered_prob_accuracy(aligned_filter.pi_path,
                                                       true_filter.pi_path);
              r.has_filtprob = true;
              r.fp_mse = mse;
              r.fp_mae = mae;
            }
          }
        } catch (const Error& e) {
          r.error = e.what();
        } catch (const std::exception& e) {
          r.error = e.what();
        }
        r.done = true;

        std::lock_guard<std::mutex> lock(io_mutex);
        if (jsonl_out.is_open()) {
          jsonl_out << record_to_json(r, est_spec).dump() << '\n';
          jsonl_out.flush();
        }
        if (progress) progress(r);
      }
    }
  };

  if (threads > 1) {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  } else {
    worker();
  }

  res.cells = aggregate_records(res.records, s);
  return res;
}

std::vector<CellAggregate> aggregate_records(const std::vector<RepRecord>& records,
                                             const McScenario& s) {
  auto [true_spec, true_params] = dgp_preset(s.dgp_id);
  std::vector<CellAggregate> cells;
  for (Dynamics model : s.estimation_models) {
    CellAggregate cell;
    cell.dgp_id = s.dgp_id;
    cell.k = true_spec.k;
    cell.t_len = s.t_len;
    cell.model = model;
    ModelSpec est_spec = true_spec;
    est_spec.dynamics = model;

    std::vector<RepEstimate> reps;
    int n_fp = 0;
    for (const RepRecord& r : records) {
      if (r.model != model || r.dgp_id != s.dgp_id || r.t_len != s.t_len)
        continue;
      ++cell.r_total;
      if (!r.converged) continue;
      ++cell.r_converged;
      reps.push_back(r.aligned);
      cell.forecast.mafe += r.forecast.mafe;
      cell.forecast.msfe += r.forecast.msfe;
      cell.forecast.masfe += r.forecast.masfe;
      cell.forecast.mssfe += r.forecast.mssfe;
      if (r.has_filtprob) {
        cell.has_filtprob = true;
        cell.fp_mse += r.fp_mse;
        cell.fp_mae += r.fp_mae;
        ++n_fp;
      }
    }
    if (cell.r_converged > 0) {
      cell.forecast.mafe /= cell.r_converged;
      cell.forecast.msfe /= cell.r_converged;
      cell.forecast.masfe /= cell.r_converged;
      cell.forecast.mssfe /= cell.r_converged;
      Params truth = true_params;
      if (model != true_spec.dynamics) {
        // Misspecified fits have no true dynamic coefficients; recovery is
        // reported for the shared (mu, sigma2, pi0) groups against zeroed
        // slopes so the A column reads as the raw coefficient magnitude.
        truth.theta.assign(est_spec.dynamics_dim(), 0.0);
        truth.gamma.assign(est_spec.dynamics_dim(), 0.0);
        truth.a.assign(est_spec.dynamics_dim(), 0.0);
        truth.b.assign(est_spec.dynamics_dim(), 0.5);
      }
      cell.recovery = recovery_metrics(reps, truth, est_spec, 10.0);
    }
    if (n_fp > 0) {
      cell.fp_mse /= n_fp;
      cell.fp_mae /= n_fp;
    }
    cells.push_back(cell);
  }
  return cells;
}

void write_mc_tables(const std::vector<CellAggregate>& cells,
                     const std::string& out_dir) {
  auto open = [&](const std::string& name, const std::string& header) {
    std::ofstream f(out_dir + "/" + name);
    if (!f) fail(ErrorCode::Io, "cannot write " + out_dir + "/" + name);
    f << header << '\n';
    return f;
  };
  std::ofstream t3 = open("table3_recovery.csv",
                          "dgp,model,K,T,group,bias,rmse,n_used");
  std::ofstream t4 = open("table4_coverage.csv",
                          "dgp,model,K,T,group,coverage,n_used");
  std::ofstream t5 = open("table5_forecast.csv",
                          "dgp,model,K,T,r_total,r_converged,mafe,msfe,masfe,mssfe");
  std::ofstream t6 = open("table6_filtprob.csv", "dgp,model,K,T,mse,mae");
  for (const CellAggregate& c : cells) {
    std::string base = std::to_string(c.dgp_id) + "," + to_string(c.model) +
                       "," + std::to_string(c.k) + "," + std::to_string(c.t_len);
    for (const MetricsRow& row : c.recovery) {
      t3 << base << ',' << to_string(row.group) << ',' << row.bias << ','
         << row.rmse << ',' << row.n_used << '\n';
      t4 << base << ',' << to_string(row.group) << ',' << row.coverage << ','
         << row.n_used << '\n';
    }
    t5 << base << ',' << c.r_total << ',' << c.r_converged << ','
       << c.forecast.mafe << ',' << c.forecast.msfe << ',' << c.forecast.masfe
       << ',' << c.forecast.mssfe << '\n';
    if (c.has_filtprob)
      t6 << base << ',' << c.fp_mse << ',' << c.fp_mae << '\n';
  }
}

std::vector<McScenario> scenarios_from_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::Io, std::string("config parse error: ") + e.what());
  }
  std::vector<McScenario> out;
  for (const json& sj : j.at("scenarios")) {
    McScenario s;
    s.dgp_id = sj.at("dgp").get<int>();
    s.t_len = sj.at("T").get<int>();
    s.replications = sj.value("replications", 50);
    s.n_starts = sj.value("n_starts", 10);
    s.burn_in = sj.value("burn_in", 100);
    s.cutoff = sj.value("cutoff", 10);
    s.base_seed = sj.value("base_seed", 1);
    if (sj.contains("estimation_models")) {
      for (const auto& m : sj.at("estimation_models"))
        s.estimation_models.push_back(dynamics_from_string(m.get<std::string>()));
    } else {
      s.estimation_models = estimation_models_for_dgp(s.dgp_id);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace mstvtp
