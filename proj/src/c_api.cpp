// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/mstvtp.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "mstvtp/csv.hpp"
#include "mstvtp/empirical.hpp"
#include "mstvtp/estimate.hpp"
#include "mstvtp/filter.hpp"
#include "mstvtp/json_io.hpp"
#include "mstvtp/link.hpp"
#include "mstvtp/mc.hpp"
#include "mstvtp/metrics.hpp"
#include "mstvtp/simulate.hpp"

using namespace mstvtp;

struct mstvtp_model {
  ModelSpec spec;
  Params params;
  bool has_params = false;
};

struct mstvtp_dataset {
  Dataset data;
};

struct mstvtp_sim_result {
  ModelSpec spec;
  SimOutput sim;
  std::vector<int> z1;  // 1-based regimes for the C surface
};

struct mstvtp_filter_result {
  FilterOutput out;
};

struct mstvtp_fit_result {
  ModelSpec spec;
  EstimationResult est;
};

namespace {

thread_local std::string g_last_error;

mstvtp_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return MSTVTP_ERR_INVALID_ARGUMENT;
    case ErrorCode::Dimension: return MSTVTP_ERR_DIMENSION;
    case ErrorCode::Domain: return MSTVTP_ERR_DOMAIN;
    case ErrorCode::NonFinite: return MSTVTP_ERR_NONFINITE;
    case ErrorCode::Degenerate: return MSTVTP_ERR_DEGENERATE;
    case ErrorCode::NonConvergence: return MSTVTP_ERR_NONCONVERGENCE;
    case ErrorCode::Io: return MSTVTP_ERR_IO;
    case ErrorCode::Internal: return MSTVTP_ERR_INTERNAL;
  }
  return MSTVTP_ERR_INTERNAL;
}

template <typename F>
mstvtp_status guarded(F&& body) {
  try {
    body();
    return MSTVTP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MSTVTP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MSTVTP_ERR_INTERNAL;
  }
}

mstvtp_status require(bool cond, const char* msg) {
  if (cond) return MSTVTP_OK;
  g_last_error = msg;
  return MSTVTP_ERR_INVALID_ARGUMENT;
}

Dynamics to_dynamics(mstvtp_dynamics d) {
  switch (d) {
    case MSTVTP_DYN_CONSTANT: return Dynamics::Constant;
    case MSTVTP_DYN_TVP: return Dynamics::LaggedObs;
    case MSTVTP_DYN_EXOG: return Dynamics::Exogenous;
    case MSTVTP_DYN_GAS: return Dynamics::ScoreDriven;
  }
  fail(ErrorCode::InvalidArgument, "unknown dynamics value");
}

mstvtp_dynamics from_dynamics(Dynamics d) {
  switch (d) {
    case Dynamics::Constant: return MSTVTP_DYN_CONSTANT;
    case Dynamics::LaggedObs: return MSTVTP_DYN_TVP;
    case Dynamics::Exogenous: return MSTVTP_DYN_EXOG;
    case Dynamics::ScoreDriven: return MSTVTP_DYN_GAS;
  }
  return MSTVTP_DYN_CONSTANT;
}

ModelSpec make_spec(int k, int diagonal, int common_variance,
                    mstvtp_dynamics dynamics) {
  ModelSpec spec;
  spec.k = k;
  spec.parameterization =
      diagonal ? Parameterization::Diagonal : Parameterization::OffDiagonal;
  spec.variance = common_variance ? VarianceStructure::Common
                                  : VarianceStructure::RegimeSpecific;
  spec.dynamics = to_dynamics(dynamics);
  spec.validate();
  return spec;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<int> parse_int_list(const char* text) {
  std::vector<int> out;
  std::stringstream ss(text ? text : "");
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

std::vector<Dynamics> parse_model_list(const char* text) {
  std::vector<Dynamics> out;
  std::stringstream ss(text ? text : "");
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(dynamics_from_string(tok));
  return out;
}

}  // namespace

extern "C" {

const char* mstvtp_version(void) { return "0.1.0"; }

const char* mstvtp_last_error(void) { return g_last_error.c_str(); }

void mstvtp_string_free(char* s) { std::free(s); }

/* ---------- model ---------- */

mstvtp_status mstvtp_model_create(int k, int diagonal, int common_variance,
                                  mstvtp_dynamics dynamics, mstvtp_model** out) {
  if (auto rc = require(out != nullptr, "out is null")) return rc;
  return guarded([&] {
    auto m = std::make_unique<mstvtp_model>();
    m->spec = make_spec(k, diagonal, common_variance, dynamics);
    *out = m.release();
  });
}

mstvtp_status mstvtp_model_set_params(mstvtp_model* m, const double* mu,
                                      int n_mu, const double* sigma2,
                                      int n_sigma2, const double* f0, int n_f0,
                                      const double* dyn1, int n_dyn1,
                                      const double* dyn2, int n_dyn2) {
  if (auto rc = require(m != nullptr, "model is null")) return rc;
  return guarded([&] {
    Params p;
    p.mu.assign(mu, mu + n_mu);
    p.sigma2.assign(sigma2, sigma2 + n_sigma2);
    if (f0 && n_f0 > 0) p.f0.assign(f0, f0 + n_f0);
    switch (m->spec.dynamics) {
      case Dynamics::Constant:
        break;
      case Dynamics::LaggedObs:
        if (dyn1) p.theta.assign(dyn1, dyn1 + n_dyn1);
        break;
      case Dynamics::Exogenous:
        if (dyn1) p.gamma.assign(dyn1, dyn1 + n_dyn1);
        break;
      case Dynamics::ScoreDriven:
        if (dyn1) p.a.assign(dyn1, dyn1 + n_dyn1);
        if (dyn2) p.b.assign(dyn2, dyn2 + n_dyn2);
        break;
    }
    p.validate(m->spec);
    m->params = std::move(p);
    m->has_params = true;
  });
}

mstvtp_status mstvtp_model_from_json(const char* json_text, mstvtp_model** out) {
  if (auto rc = require(json_text && out, "null argument")) return rc;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(json_text);
    auto m = std::make_unique<mstvtp_model>();
    std::tie(m->spec, m->params) = model_from_json(j);
    m->has_params = true;
    *out = m.release();
  });
}

mstvtp_status mstvtp_model_from_json_file(const char* path, mstvtp_model** out) {
  if (auto rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, std::string("cannot open '") + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j = nlohmann::json::parse(ss.str());
    auto m = std::make_unique<mstvtp_model>();
    std::tie(m->spec, m->params) = model_from_json(j);
    m->has_params = true;
    *out = m.release();
  });
}

mstvtp_status mstvtp_model_to_json(const mstvtp_model* m, char** out_json) {
  if (auto rc = require(m && out_json, "null argument")) return rc;
  if (auto rc = require(m->has_params, "model has no parameters")) return rc;
  return guarded([&] {
    *out_json = dup_string(model_to_json(m->spec, m->params).dump(2));
  });
}

mstvtp_status mstvtp_dgp_preset(int id, mstvtp_model** out) {
  if (auto rc = require(out != nullptr, "out is null")) return rc;
  return guarded([&] {
    auto m = std::make_unique<mstvtp_model>();
    std::tie(m->spec, m->params) = dgp_preset(id);
    m->has_params = true;
    *out = m.release();
  });
}

int mstvtp_model_k(const mstvtp_model* m) { return m ? m->spec.k : 0; }

int mstvtp_model_param_count(const mstvtp_model* m) {
  return m ? m->spec.param_count() : 0;
}

mstvtp_dynamics mstvtp_model_dynamics(const mstvtp_model* m) {
  return m ? from_dynamics(m->spec.dynamics) : MSTVTP_DYN_CONSTANT;
}

mstvtp_status mstvtp_model_transition_matrix(const mstvtp_model* m,
                                             double* out) {
  if (auto rc = require(m && out, "null argument")) return rc;
  if (auto rc = require(m->has_params, "model has no parameters")) return rc;
  return guarded([&] {
    TransitionMatrix P = link_f_to_matrix(m->params.f0, m->spec);
    std::memcpy(out, P.p.data(), P.p.size() * sizeof(double));
  });
}

void mstvtp_model_free(mstvtp_model* m) { delete m; }

/* ---------- dataset ---------- */

mstvtp_status mstvtp_dataset_create(const double* y, int n, const double* x,
                                    mstvtp_dataset** out) {
  if (auto rc = require(y && out && n > 0, "need observations and out")) return rc;
  return guarded([&] {
    auto d = std::make_unique<mstvtp_dataset>();
    d->data.y.assign(y, y + n);
    if (x) d->data.x.assign(x, x + n);
    d->data.validate();
    *out = d.release();
  });
}

mstvtp_status mstvtp_dataset_from_csv(const char* path, mstvtp_dataset** out) {
  if (auto rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    auto d = std::make_unique<mstvtp_dataset>();
    d->data = dataset_from_csv(path);
    *out = d.release();
  });
}

mstvtp_status mstvtp_dataset_to_csv(const mstvtp_dataset* d, const char* path) {
  if (auto rc = require(d && path, "null argument")) return rc;
  return guarded([&] { dataset_to_csv(d->data, path); });
}

int mstvtp_dataset_length(const mstvtp_dataset* d) {
  return d ? d->data.length() : 0;
}

const double* mstvtp_dataset_y(const mstvtp_dataset* d) {
  return d ? d->data.y.data() : nullptr;
}

const double* mstvtp_dataset_x(const mstvtp_dataset* d) {
  return (d && d->data.has_covariate()) ? d->data.x.data() : nullptr;
}

void mstvtp_dataset_free(mstvtp_dataset* d) { delete d; }

/* ---------- simulation ---------- */

mstvtp_status mstvtp_simulate(const mstvtp_model* m, int t_len, int burn_in,
                              uint64_t seed, mstvtp_sim_result** out) {
  if (auto rc = require(m && out, "null argument")) return rc;
  if (auto rc = require(m->has_params, "model has no parameters")) return rc;
  return guarded([&] {
    auto s = std::make_unique<mstvtp_sim_result>();
    s->spec = m->spec;
    s->sim = simulate(m->spec, m->params, t_len, burn_in, seed);
    s->z1.reserve(s->sim.z.size());
    for (int z : s->sim.z) s->z1.push_back(z + 1);
    *out = s.release();
  });
}

int mstvtp_sim_length(const mstvtp_sim_result* s) {
  return s ? static_cast<int>(s->sim.y.size()) : 0;
}

const double* mstvtp_sim_y(const mstvtp_sim_result* s) {
  return s ? s->sim.y.data() : nullptr;
}

const int* mstvtp_sim_z(const mstvtp_sim_result* s) {
  return s ? s->z1.data() : nullptr;
}

const double* mstvtp_sim_x(const mstvtp_sim_result* s) {
  return (s && !s->sim.x.empty()) ? s->sim.x.data() : nullptr;
}

const double* mstvtp_sim_pi_path(const mstvtp_sim_result* s) {
  return s ? s->sim.pi_true_path.data() : nullptr;
}

mstvtp_status mstvtp_sim_to_csv(const mstvtp_sim_result* s, const char* path) {
  if (auto rc = require(s && path, "null argument")) return rc;
  return guarded([&] {
    std::ofstream f(path);
    if (!f) fail(ErrorCode::Io, std::string("cannot write '") + path + "'");
    bool with_x = !s->sim.x.empty();
    f << (with_x ? "t,y,z,x\n" : "t,y,z\n");
    for (size_t t = 0; t < s->sim.y.size(); ++t) {
      f << (t + 1) << ',' << format_double(s->sim.y[t]) << ',' << s->z1[t];
      if (with_x) f << ',' << format_double(s->sim.x[t]);
      f << '\n';
    }
  });
}

mstvtp_status mstvtp_sim_to_dataset(const mstvtp_sim_result* s,
                                    mstvtp_dataset** out) {
  if (auto rc = require(s && out, "null argument")) return rc;
  return guarded([&] {
    auto d = std::make_unique<mstvtp_dataset>();
    d->data.y = s->sim.y;
    d->data.x = s->sim.x;
    *out = d.release();
  });
}

void mstvtp_sim_free(mstvtp_sim_result* s) { delete s; }

/* ---------- filtering ---------- */

mstvtp_status mstvtp_filter(const mstvtp_model* m, const mstvtp_dataset* d,
                            int cutoff, mstvtp_filter_result** out) {
  if (auto rc = require(m && d && out, "null argument")) return rc;
  if (auto rc = require(m->has_params, "model has no parameters")) return rc;
  return guarded([&] {
    auto f = std::make_unique<mstvtp_filter_result>();
    f->out = run_filter(d->data, m->spec, m->params, cutoff);
    *out = f.release();
  });
}

double mstvtp_filter_loglik(const mstvtp_filter_result* f) {
  return f ? f->out.loglik : 0.0;
}

int mstvtp_filter_t_len(const mstvtp_filter_result* f) {
  return f ? f->out.t_len : 0;
}

int mstvtp_filter_k(const mstvtp_filter_result* f) { return f ? f->out.k : 0; }

const double* mstvtp_filter_xi_pred(const mstvtp_filter_result* f) {
  return f ? f->out.xi_pred.data() : nullptr;
}

const double* mstvtp_filter_xi_filt(const mstvtp_filter_result* f) {
  return f ? f->out.xi_filt.data() : nullptr;
}

const double* mstvtp_filter_pi_path(const mstvtp_filter_result* f) {
  return f ? f->out.pi_path.data() : nullptr;
}

const double* mstvtp_filter_pred_mean(const mstvtp_filter_result* f) {
  return f ? f->out.pred_mean.data() : nullptr;
}

const double* mstvtp_filter_pred_var(const mstvtp_filter_result* f) {
  return f ? f->out.pred_var.data() : nullptr;
}

int mstvtp_filter_degenerate(const mstvtp_filter_result* f) {
  return (f && f->out.degenerate) ? 1 : 0;
}

mstvtp_status mstvtp_filter_classify(const mstvtp_filter_result* f, int* out) {
  if (auto rc = require(f && out, "null argument")) return rc;
  return guarded([&] {
    auto z = classify_regimes(f->out);
    for (size_t i = 0; i < z.size(); ++i) out[i] = z[i] + 1;
  });
}

void mstvtp_filter_free(mstvtp_filter_result* f) { delete f; }

mstvtp_status mstvtp_forecast_metrics(const mstvtp_filter_result* f,
                                      const mstvtp_dataset* d, int cutoff,
                                      double out_metrics[4]) {
  if (auto rc = require(f && d && out_metrics, "null argument")) return rc;
  return guarded([&] {
    ForecastMetrics fm = forecast_metrics(f->out, d->data.y, cutoff);
    out_metrics[0] = fm.mafe;
    out_metrics[1] = fm.msfe;
    out_metrics[2] = fm.masfe;
    out_metrics[3] = fm.mssfe;
  });
}

/* ---------- estimation ---------- */

mstvtp_status mstvtp_fit(const mstvtp_dataset* d, int k, int diagonal,
                         int common_variance, mstvtp_dynamics dynamics,
                         int n_starts, uint64_t seed, int cutoff, int threads,
                         mstvtp_fit_result** out) {
  if (auto rc = require(d && out, "null argument")) return rc;
  return guarded([&] {
    auto r = std::make_unique<mstvtp_fit_result>();
    r->spec = make_spec(k, diagonal, common_variance, dynamics);
    r->est = estimate(d->data, r->spec, n_starts, seed, cutoff,
                      threads > 0 ? threads : 1);
    *out = r.release();
  });
}

int mstvtp_fit_converged(const mstvtp_fit_result* r) {
  return (r && r->est.converged) ? 1 : 0;
}

int mstvtp_fit_n_starts_converged(const mstvtp_fit_result* r) {
  return r ? r->est.n_starts_converged : 0;
}

double mstvtp_fit_loglik(const mstvtp_fit_result* r) {
  return r ? r->est.loglik : 0.0;
}

double mstvtp_fit_aic(const mstvtp_fit_result* r) { return r ? r->est.aic : 0.0; }

double mstvtp_fit_bic(const mstvtp_fit_result* r) { return r ? r->est.bic : 0.0; }

mstvtp_status mstvtp_fit_model(const mstvtp_fit_result* r, mstvtp_model** out) {
  if (auto rc = require(r && out, "null argument")) return rc;
  if (auto rc = require(r->est.best_start_index >= 0, "fit has no usable optimum"))
    return rc;
  return guarded([&] {
    auto m = std::make_unique<mstvtp_model>();
    m->spec = r->spec;
    m->params = r->est.params_hat;
    m->has_params = true;
    *out = m.release();
  });
}

mstvtp_status mstvtp_fit_to_json(const mstvtp_fit_result* r, char** out_json) {
  if (auto rc = require(r && out_json, "null argument")) return rc;
  return guarded([&] {
    nlohmann::json j = estimation_result_to_json(r->est, r->spec);
    j["spec"] = spec_to_json(r->spec);
    *out_json = dup_string(j.dump(2));
  });
}

void mstvtp_fit_free(mstvtp_fit_result* r) { delete r; }

/* ---------- profile likelihood ---------- */

mstvtp_status mstvtp_profile(const mstvtp_dataset* d, const mstvtp_model* fitted,
                             const char* const* dims, int n_dims,
                             const double* grid, int n_points, int cutoff,
                             double* out_values) {
  if (auto rc = require(d && fitted && dims && grid && out_values,
                        "null argument"))
    return rc;
  if (auto rc = require(fitted->has_params, "model has no parameters")) return rc;
  if (auto rc = require(n_dims > 0 && n_points > 0, "empty profile request"))
    return rc;
  return guarded([&] {
    std::vector<std::string> names(dims, dims + n_dims);
    std::vector<std::vector<double>> points(n_points,
                                            std::vector<double>(n_dims));
    for (int i = 0; i < n_points; ++i)
      for (int j = 0; j < n_dims; ++j) points[i][j] = grid[i * n_dims + j];
    ProfileResult res = profile_loglik(d->data, fitted->spec, fitted->params,
                                       names, points, cutoff);
    for (int i = 0; i < n_points; ++i) out_values[i] = res.values[i];
  });
}

/* ---------- monte carlo harness ---------- */

mstvtp_status mstvtp_mc_run(const char* config_path, int paper_grid,
                            int replications_override, int n_starts_override,
                            uint64_t base_seed, int burn_in, int cutoff,
                            int threads, const char* out_dir, int verbose) {
  if (auto rc = require(out_dir != nullptr, "out_dir is null")) return rc;
  if (auto rc = require(paper_grid || config_path,
                        "need a config file or the paper grid flag"))
    return rc;
  return guarded([&] {
    std::filesystem::create_directories(out_dir);
    std::vector<McScenario> scenarios =
        paper_grid ? default_grid(base_seed)
                   : scenarios_from_config(config_path);
    for (McScenario& s : scenarios) {
      if (replications_override > 0) s.replications = replications_override;
      if (n_starts_override > 0) s.n_starts = n_starts_override;
      if (paper_grid) {
        if (burn_in >= 0) s.burn_in = burn_in;
        if (cutoff >= 0) s.cutoff = cutoff;
        s.base_seed = base_seed;
      }
    }
    std::string jsonl = std::string(out_dir) + "/replications.jsonl";
    std::vector<CellAggregate> cells;
    for (const McScenario& s : scenarios) {
      std::function<void(const RepRecord&)> progress;
      if (verbose) {
        progress = [](const RepRecord& r) {
          std::cerr << "dgp " << r.dgp_id << " T " << r.t_len << " model "
                    << to_string(r.model) << " rep " << r.rep
                    << (r.converged ? " converged" : " not converged") << '\n';
        };
      }
      McResult res = run_scenario(s, threads > 0 ? threads : 1, jsonl, progress);
      cells.insert(cells.end(), res.cells.begin(), res.cells.end());
    }
    write_mc_tables(cells, out_dir);
  });
}

/* ---------- empirical pipeline ---------- */

mstvtp_status mstvtp_empirical(const char* yields_csv, const char* maturities,
                               const char* models, int k, int n_starts,
                               uint64_t seed, int cutoff, int threads,
                               const char* out_dir, const char* date_from,
                               const char* date_to) {
  if (auto rc = require(yields_csv && out_dir, "null argument")) return rc;
  return guarded([&] {
    std::filesystem::create_directories(out_dir);
    EmpiricalConfig cfg;
    cfg.yields_csv = yields_csv;
    if (maturities && *maturities) cfg.maturities = parse_int_list(maturities);
    if (models && *models) cfg.models = parse_model_list(models);
    cfg.k = k > 0 ? k : 3;
    cfg.n_starts = n_starts > 0 ? n_starts : 100;
    cfg.seed = seed;
    cfg.cutoff = cutoff >= 0 ? cutoff : 0;
    cfg.threads = threads > 0 ? threads : 1;
    if (date_from) cfg.date_from = date_from;
    if (date_to) cfg.date_to = date_to;
    EmpiricalReport report = run_empirical(cfg);
    write_empirical_report(report, out_dir);
  });
}

}  // extern "C"
