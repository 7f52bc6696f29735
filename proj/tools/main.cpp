// Licensed under the Apache License 2.0 (see LICENSE file).

// Command-line front end. Everything below talks to the shared library
// through the C interface in mstvtp/mstvtp.h only.

#include <CLI11.hpp>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "mstvtp/mstvtp.h"

namespace {

// Exit codes: 0 ok, 1 usage, 2 data/processing error, 3 non-convergence of a
// mandatory fit.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNonConvergence = 3;

int exit_code_for(mstvtp_status rc) {
  switch (rc) {
    case MSTVTP_OK: return kExitOk;
    case MSTVTP_ERR_INVALID_ARGUMENT: return kExitUsage;
    case MSTVTP_ERR_NONCONVERGENCE: return kExitNonConvergence;
    default: return kExitData;
  }
}

int report_error(mstvtp_status rc, const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, mstvtp_last_error());
  return exit_code_for(rc);
}

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 1;
  int cutoff = -1;   // -1 = subcommand default
  int burn_in = -1;  // -1 = subcommand default
  std::string out_dir = ".";
};

int parse_dynamics(const std::string& name, mstvtp_dynamics* out) {
  if (name == "const" || name == "constant") *out = MSTVTP_DYN_CONSTANT;
  else if (name == "tvp" || name == "lagged") *out = MSTVTP_DYN_TVP;
  else if (name == "exog" || name == "exogenous") *out = MSTVTP_DYN_EXOG;
  else if (name == "gas" || name == "score") *out = MSTVTP_DYN_GAS;
  else return 1;
  return 0;
}

using ModelPtr = std::unique_ptr<mstvtp_model, decltype(&mstvtp_model_free)>;
using DatasetPtr = std::unique_ptr<mstvtp_dataset, decltype(&mstvtp_dataset_free)>;

int load_model(const std::string& json_path, int dgp, ModelPtr& model) {
  mstvtp_model* raw = nullptr;
  mstvtp_status rc;
  if (dgp > 0) {
    rc = mstvtp_dgp_preset(dgp, &raw);
    if (rc != MSTVTP_OK) return report_error(rc, "dgp preset");
  } else {
    rc = mstvtp_model_from_json_file(json_path.c_str(), &raw);
    if (rc != MSTVTP_OK) return report_error(rc, "model file");
  }
  model.reset(raw);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-regime Gaussian Markov-switching models with time-varying "
               "transition probabilities"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_version_flag("--version", std::string(mstvtp_version()));

  GlobalOpts g;
  app.add_option("--seed", g.seed, "base random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
  app.add_option("--cutoff", g.cutoff,
                 "likelihood terms excluded from the objective");
  app.add_option("--burn-in", g.burn_in, "simulation burn-in length");
  app.add_option("--out-dir", g.out_dir, "output directory")
      ->capture_default_str();

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "simulate a model to CSV");
  int sim_dgp = 0, sim_T = 500;
  std::string sim_model_json, sim_out = "sim.csv";
  sim_cmd->add_option("--dgp", sim_dgp, "preset 1..9");
  sim_cmd->add_option("--model", sim_model_json, "model JSON file");
  sim_cmd->add_option("--T", sim_T, "sample size")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "output CSV")->capture_default_str();

  // ---- fit ----
  auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit to JSON");
  std::string fit_data, fit_model = "const", fit_out;
  int fit_k = 2, fit_starts = 10;
  bool fit_diagonal = false, fit_common = false;
  fit_cmd->add_option("--data", fit_data, "data CSV with a y column")->required();
  fit_cmd->add_option("--model", fit_model, "const|tvp|exog|gas")
      ->capture_default_str();
  fit_cmd->add_option("--k", fit_k, "regime count")->capture_default_str();
  fit_cmd->add_flag("--diagonal", fit_diagonal,
                    "diagonal transition parameterization (k=2)");
  fit_cmd->add_flag("--common-variance", fit_common,
                    "one variance shared across regimes");
  fit_cmd->add_option("--starts", fit_starts, "random starting points")
      ->capture_default_str();
  fit_cmd->add_option("--out", fit_out, "result JSON path (default stdout)");

  // ---- filter ----
  auto* flt_cmd = app.add_subcommand("filter", "regime probabilities to CSV");
  std::string flt_data, flt_model_json, flt_out = "filter.csv";
  int flt_dgp = 0;
  flt_cmd->add_option("--data", flt_data, "data CSV")->required();
  flt_cmd->add_option("--model", flt_model_json, "model JSON file");
  flt_cmd->add_option("--dgp", flt_dgp, "preset 1..9 instead of --model");
  flt_cmd->add_option("--out", flt_out, "output CSV")->capture_default_str();

  // ---- forecast-metrics ----
  auto* fm_cmd = app.add_subcommand("forecast-metrics",
                                    "one-step forecast error metrics");
  std::string fm_data, fm_model_json;
  int fm_dgp = 0;
  fm_cmd->add_option("--data", fm_data, "data CSV")->required();
  fm_cmd->add_option("--model", fm_model_json, "model JSON file");
  fm_cmd->add_option("--dgp", fm_dgp, "preset 1..9 instead of --model");

  // ---- mc ----
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo study grid");
  bool mc_paper = false;
  std::string mc_config;
  int mc_reps = 0, mc_starts = 0;
  bool mc_verbose = false;
  mc_cmd->add_flag("--paper-grid", mc_paper, "run the 18-cell study grid");
  mc_cmd->add_option("--config", mc_config, "scenario JSON file");
  mc_cmd->add_option("--replications", mc_reps, "override replication count");
  mc_cmd->add_option("--starts", mc_starts, "override starts per fit");
  mc_cmd->add_flag("--verbose", mc_verbose, "per-replication progress");

  // ---- profile ----
  auto* prof_cmd = app.add_subcommand("profile", "profile log-likelihood grid");
  std::string prof_data, prof_model_json, prof_out = "profile.csv";
  std::vector<std::string> prof_dims;
  std::vector<std::string> prof_ranges;
  prof_cmd->add_option("--data", prof_data, "data CSV")->required();
  prof_cmd->add_option("--model", prof_model_json, "fitted model JSON file")
      ->required();
  prof_cmd->add_option("--dim", prof_dims,
                       "coordinate name (repeat for 2-D grids)")
      ->required();
  prof_cmd->add_option("--range", prof_ranges,
                       "min:max:steps per --dim (same order)")
      ->required();
  prof_cmd->add_option("--out", prof_out, "output CSV")->capture_default_str();

  // ---- empirical ----
  auto* emp_cmd = app.add_subcommand("empirical",
                                     "yield-change regime analysis");
  std::string emp_data, emp_maturities = "1,12,36,72";
  std::string emp_models = "const,tvp,exog";
  std::string emp_from, emp_to;
  int emp_k = 3, emp_starts = 100;
  emp_cmd->add_option("--data", emp_data, "yield levels CSV")->required();
  emp_cmd->add_option("--maturities", emp_maturities, "months, comma separated")
      ->capture_default_str();
  emp_cmd->add_option("--models", emp_models, "const,tvp,exog,gas subset")
      ->capture_default_str();
  emp_cmd->add_option("--k", emp_k, "regime count")->capture_default_str();
  emp_cmd->add_option("--starts", emp_starts, "random starting points")
      ->capture_default_str();
  emp_cmd->add_option("--date-from", emp_from, "first month, YYYY-MM");
  emp_cmd->add_option("--date-to", emp_to, "last month, YYYY-MM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*sim_cmd) {
    if (sim_dgp == 0 && sim_model_json.empty()) {
      std::fprintf(stderr, "error: simulate needs --dgp or --model\n");
      return kExitUsage;
    }
    ModelPtr model(nullptr, mstvtp_model_free);
    if (int rc = load_model(sim_model_json, sim_dgp, model)) return rc;
    mstvtp_sim_result* sim = nullptr;
    int burn = g.burn_in >= 0 ? g.burn_in : 100;
    mstvtp_status rc = mstvtp_simulate(model.get(), sim_T, burn, g.seed, &sim);
    if (rc != MSTVTP_OK) return report_error(rc, "simulate");
    rc = mstvtp_sim_to_csv(sim, sim_out.c_str());
    mstvtp_sim_free(sim);
    if (rc != MSTVTP_OK) return report_error(rc, "write csv");
    std::printf("wrote %s\n", sim_out.c_str());
    return kExitOk;
  }

  if (*fit_cmd) {
    mstvtp_dynamics dyn;
    if (parse_dynamics(fit_model, &dyn)) {
      std::fprintf(stderr, "error: unknown model '%s'\n", fit_model.c_str());
      return kExitUsage;
    }
    mstvtp_dataset* raw_data = nullptr;
    mstvtp_status rc = mstvtp_dataset_from_csv(fit_data.c_str(), &raw_data);
    if (rc != MSTVTP_OK) return report_error(rc, "data");
    DatasetPtr data(raw_data, mstvtp_dataset_free);

    int cutoff = g.cutoff >= 0 ? g.cutoff : 0;
    mstvtp_fit_result* fit = nullptr;
    rc = mstvtp_fit(data.get(), fit_k, fit_diagonal ? 1 : 0, fit_common ? 1 : 0,
                    dyn, fit_starts, g.seed, cutoff, g.threads, &fit);
    if (rc != MSTVTP_OK) return report_error(rc, "fit");

    char* json = nullptr;
    rc = mstvtp_fit_to_json(fit, &json);
    if (rc != MSTVTP_OK) {
      mstvtp_fit_free(fit);
      return report_error(rc, "serialize");
    }
    if (fit_out.empty()) {
      std::printf("%s\n", json);
    } else {
      std::ofstream out(fit_out);
      out << json << '\n';
      std::printf("wrote %s\n", fit_out.c_str());
    }
    int converged = mstvtp_fit_converged(fit);
    mstvtp_string_free(json);
    mstvtp_fit_free(fit);
    return converged ? kExitOk : kExitNonConvergence;
  }

  if (*flt_cmd || *fm_cmd) {
    bool filtering = static_cast<bool>(*flt_cmd);
    const std::string& data_path = filtering ? flt_data : fm_data;
    const std::string& model_path = filtering ? flt_model_json : fm_model_json;
    int dgp = filtering ? flt_dgp : fm_dgp;
    if (dgp == 0 && model_path.empty()) {
      std::fprintf(stderr, "error: need --dgp or --model\n");
      return kExitUsage;
    }
    ModelPtr model(nullptr, mstvtp_model_free);
    if (int rc = load_model(model_path, dgp, model)) return rc;
    mstvtp_dataset* raw_data = nullptr;
    mstvtp_status rc = mstvtp_dataset_from_csv(data_path.c_str(), &raw_data);
    if (rc != MSTVTP_OK) return report_error(rc, "data");
    DatasetPtr data(raw_data, mstvtp_dataset_free);

    int cutoff = g.cutoff >= 0 ? g.cutoff : 0;
    mstvtp_filter_result* flt = nullptr;
    rc = mstvtp_filter(model.get(), data.get(), cutoff, &flt);
    if (rc != MSTVTP_OK) return report_error(rc, "filter");

    if (!filtering) {
      double m[4];
      rc = mstvtp_forecast_metrics(flt, data.get(), cutoff, m);
      mstvtp_filter_free(flt);
      if (rc != MSTVTP_OK) return report_error(rc, "metrics");
      std::printf("mafe,msfe,masfe,mssfe\n%.10g,%.10g,%.10g,%.10g\n", m[0],
                  m[1], m[2], m[3]);
      return kExitOk;
    }

    int T = mstvtp_filter_t_len(flt);
    int k = mstvtp_filter_k(flt);
    std::vector<int> regime(T);
    mstvtp_filter_classify(flt, regime.data());
    const double* xp = mstvtp_filter_xi_pred(flt);
    const double* xf = mstvtp_filter_xi_filt(flt);
    const double* y = mstvtp_dataset_y(data.get());
    std::ofstream out(flt_out);
    if (!out) {
      mstvtp_filter_free(flt);
      std::fprintf(stderr, "error: cannot write %s\n", flt_out.c_str());
      return kExitData;
    }
    out << "t,y";
    for (int j = 1; j <= k; ++j) out << ",pred" << j;
    for (int j = 1; j <= k; ++j) out << ",filt" << j;
    out << ",regime\n";
    char buf[32];
    for (int t = 0; t < T; ++t) {
      out << (t + 1);
      std::snprintf(buf, sizeof(buf), "%.10g", y[t]);
      out << ',' << buf;
      for (int j = 0; j < k; ++j) {
        std::snprintf(buf, sizeof(buf), "%.10g", xp[t * k + j]);
        out << ',' << buf;
      }
      for (int j = 0; j < k; ++j) {
        std::snprintf(buf, sizeof(buf), "%.10g", xf[t * k + j]);
        out << ',' << buf;
      }
      out << ',' << regime[t] << '\n';
    }
    out.close();
    std::printf("loglik %.10f\nwrote %s\n", mstvtp_filter_loglik(flt),
                flt_out.c_str());
    mstvtp_filter_free(flt);
    return kExitOk;
  }

  if (*mc_cmd) {
    if (!mc_paper && mc_config.empty()) {
      std::fprintf(stderr, "error: mc needs --paper-grid or --config\n");
      return kExitUsage;
    }
    mstvtp_status rc = mstvtp_mc_run(
        mc_config.empty() ? nullptr : mc_config.c_str(), mc_paper ? 1 : 0,
        mc_reps, mc_starts, g.seed, g.burn_in, g.cutoff, g.threads,
        g.out_dir.c_str(), mc_verbose ? 1 : 0);
    if (rc != MSTVTP_OK) return report_error(rc, "mc");
    std::printf("wrote tables under %s\n", g.out_dir.c_str());
    return kExitOk;
  }

  if (*prof_cmd) {
    if (prof_dims.size() != prof_ranges.size() || prof_dims.empty() ||
        prof_dims.size() > 2) {
      std::fprintf(stderr, "error: need 1 or 2 --dim with matching --range\n");
      return kExitUsage;
    }
    ModelPtr model(nullptr, mstvtp_model_free);
    if (int rc = load_model(prof_model_json, 0, model)) return rc;
    mstvtp_dataset* raw_data = nullptr;
    mstvtp_status rc = mstvtp_dataset_from_csv(prof_data.c_str(), &raw_data);
    if (rc != MSTVTP_OK) return report_error(rc, "data");
    DatasetPtr data(raw_data, mstvtp_dataset_free);

    auto parse_range = [](const std::string& text, std::vector<double>& out) {
      double lo, hi;
      int n;
      if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 1)
        return 1;
      for (int i = 0; i < n; ++i)
        out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
      return 0;
    };
    std::vector<std::vector<double>> axes(prof_dims.size());
    for (size_t i = 0; i < prof_ranges.size(); ++i) {
      if (parse_range(prof_ranges[i], axes[i])) {
        std::fprintf(stderr, "error: bad --range '%s'\n", prof_ranges[i].c_str());
        return kExitUsage;
      }
    }
    std::vector<double> grid;
    int n_points = 0;
    if (axes.size() == 1) {
      for (double v : axes[0]) grid.push_back(v);
      n_points = static_cast<int>(axes[0].size());
    } else {
      for (double a : axes[0])
        for (double b : axes[1]) {
          grid.push_back(a);
          grid.push_back(b);
        }
      n_points = static_cast<int>(axes[0].size() * axes[1].size());
    }
    std::vector<const char*> dim_ptrs;
    for (const auto& d : prof_dims) dim_ptrs.push_back(d.c_str());
    std::vector<double> values(n_points);
    int cutoff = g.cutoff >= 0 ? g.cutoff : 0;
    rc = mstvtp_profile(data.get(), model.get(), dim_ptrs.data(),
                        static_cast<int>(dim_ptrs.size()), grid.data(),
                        n_points, cutoff, values.data());
    if (rc != MSTVTP_OK) return report_error(rc, "profile");

    std::ofstream out(prof_out);
    for (const auto& d : prof_dims) out << d << ',';
    out << "loglik\n";
    for (int i = 0; i < n_points; ++i) {
      for (size_t j = 0; j < prof_dims.size(); ++j)
        out << grid[i * prof_dims.size() + j] << ',';
      out << values[i] << '\n';
    }
    std::printf("wrote %s\n", prof_out.c_str());
    return kExitOk;
  }

  if (*emp_cmd) {
    int cutoff = g.cutoff >= 0 ? g.cutoff : 0;
    mstvtp_status rc = mstvtp_empirical(
        emp_data.c_str(), emp_maturities.c_str(), emp_models.c_str(), emp_k,
        emp_starts, g.seed, cutoff, g.threads, g.out_dir.c_str(),
        emp_from.c_str(), emp_to.c_str());
    if (rc != MSTVTP_OK) return report_error(rc, "empirical");
    std::printf("wrote report under %s\n", g.out_dir.c_str());
    return kExitOk;
  }

  return kExitUsage;
}
