// Licensed under the Apache License 2.0 (see LICENSE file).

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mstvtp/mc.hpp"

using namespace mstvtp;

TEST_CASE("default grid matches the study layout") {
  auto grid = default_grid();
  CHECK(grid.size() == 18);
  for (const auto& s : grid) {
    CHECK(s.replications == 50);
    CHECK(s.n_starts == 10);
    CHECK(s.burn_in == 100);
    CHECK(s.cutoff == 10);
    CHECK((s.t_len == 500 || s.t_len == 1000));
  }
  CHECK(estimation_models_for_dgp(1) == std::vector<Dynamics>{Dynamics::Constant});
  CHECK(estimation_models_for_dgp(6) == std::vector<Dynamics>{Dynamics::Constant});
  CHECK(estimation_models_for_dgp(5) ==
        std::vector<Dynamics>{Dynamics::Constant, Dynamics::LaggedObs});
  CHECK(estimation_models_for_dgp(9).size() == 4);
  CHECK_THROWS_AS((void)estimation_models_for_dgp(0), Error);
}

namespace {

McScenario smoke_scenario() {
  McScenario s;
  s.dgp_id = 2;
  s.t_len = 120;
  s.estimation_models = {Dynamics::Constant, Dynamics::LaggedObs};
  s.replications = 2;
  s.n_starts = 3;
  s.burn_in = 30;
  s.cutoff = 5;
  s.base_seed = 77;
  return s;
}

std::string tables_digest(const std::vector<CellAggregate>& cells) {
  std::ostringstream os;
  for (const auto& c : cells) {
    os << c.dgp_id << '|' << to_string(c.model) << '|' << c.t_len << '|'
       << c.r_total << '|' << c.r_converged << '|' << c.forecast.mafe << '|'
       << c.forecast.msfe << '|' << c.fp_mse << '|' << c.fp_mae;
    for (const auto& row : c.recovery)
      os << '|' << to_string(row.group) << ':' << row.bias << ':' << row.rmse
         << ':' << row.coverage << ':' << row.n_used;
    os << '\n';
  }
  return os.str();
}

}  // namespace

TEST_CASE("smoke scenario emits one record per cell and is reproducible") {
  McScenario s = smoke_scenario();
  auto res1 = run_scenario(s);
  CHECK(res1.records.size() == 4);  // 2 reps x 2 models
  for (const auto& r : res1.records) CHECK(r.done);

  auto res2 = run_scenario(s, 2);  // threaded run, same seed
  CHECK(tables_digest(res1.cells) == tables_digest(res2.cells));

  McScenario s2 = s;
  s2.base_seed = 78;
  auto res3 = run_scenario(s2);
  CHECK(tables_digest(res1.cells) != tables_digest(res3.cells));
}

TEST_CASE("correctly specified cells carry filtered-probability accuracy") {
  McScenario s = smoke_scenario();
  auto res = run_scenario(s);
  bool any_fp = false;
  for (const auto& r : res.records) {
    if (r.model == Dynamics::LaggedObs && r.converged) {
      CHECK(r.has_filtprob);
      any_fp = true;
    }
    if (r.model == Dynamics::Constant) CHECK_FALSE(r.has_filtprob);
  }
  CHECK(any_fp);
}

TEST_CASE("jsonl persistence resumes without recomputation") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mstvtp_mc_test";
  fs::create_directories(dir);
  std::string jsonl = (dir / "replications.jsonl").string();
  std::remove(jsonl.c_str());

  McScenario s = smoke_scenario();
  auto res1 = run_scenario(s, 1, jsonl);
  std::ifstream in(jsonl);
  int lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 4);

  // resumed run loads the records and appends nothing
  auto res2 = run_scenario(s, 1, jsonl);
  CHECK(tables_digest(res1.cells) == tables_digest(res2.cells));
  std::ifstream in2(jsonl);
  int lines2 = 0;
  while (std::getline(in2, line))
    if (!line.empty()) ++lines2;
  CHECK(lines2 == 4);

  write_mc_tables(res2.cells, dir.string());
  for (const char* name : {"table3_recovery.csv", "table4_coverage.csv",
                           "table5_forecast.csv", "table6_filtprob.csv"}) {
    CHECK(fs::exists(dir / name));
  }
  fs::remove_all(dir);
}

TEST_CASE("aggregates recompute identically from raw records") {
  McScenario s = smoke_scenario();
  auto res = run_scenario(s);
  auto again = aggregate_records(res.records, s);
  CHECK(tables_digest(res.cells) == tables_digest(again));
}
