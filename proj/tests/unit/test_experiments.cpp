#include <algorithm>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "ellspec/experiments.hpp"

using namespace ellspec;

namespace {

ExperimentConfig config(const std::string& text) {
  auto cfg = ExperimentConfig::parse(text);
  cfg.validate();
  return cfg;
}

std::string label(const CaseResult& c, const std::string& key) {
  for (const auto& [k, v] : c.labels)
    if (k == key) return v;
  return {};
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = ExperimentConfig::parse(
      "# comment\n"
      "experiment = subelliptic-threshold\n"
      "model = su2-sub\n"
      "levels = 200\n"
      "alpha = 3.2, 4.8\n"
      "r=1\n");
  CHECK(cfg.experiment == "subelliptic-threshold");
  CHECK(cfg.levels == 200);
  CHECK(cfg.seed == 42);
  CHECK(cfg.list("alpha") == std::vector<double>{3.2, 4.8});
  CHECK(cfg.number("r") == 1.0);
  CHECK_THROWS_AS(cfg.number("alpha"), Error);
  CHECK(cfg.number_or("margin", 0.15) == 0.15);
  const auto again = ExperimentConfig::parse(cfg.to_text());
  CHECK(again.to_text() == cfg.to_text());
}

TEST_CASE("config syntax errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("experiment\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("alpha = 1\nalpha = 2\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("colour = blue\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("alpha = x\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("levels = -3\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/ellspec.cfg"), Error);
}

TEST_CASE("invalid configurations fail before any computation") {
  for (const char* text : {
           "experiment = nonsense\n",
           "model = t1\n",
           "experiment = kernel-sobolev\nmodel = t1\nmu1 = 0\nmu2 = 0\ns = 1\n",
           "experiment = schatten-identity\nmodel = t1\nalpha = 1\n",
           "experiment = schrodinger-threshold\nalpha = 4\ngamma = 1\n",
           "experiment = plancherel\nmodel = su2-sub\n",
           "experiment = nuclearity-threshold\nalpha = 3\nr = 1.5\n",
           "experiment = nuclearity-threshold\nalpha = 3\np2 = 0.5\n",
           "experiment = schatten-identity\nmodel = t1\nr = -1\n",
           "experiment = plancherel\nmodel = t1\ntrials = 2,3\n",
           "experiment = plancherel\nmodel = klein-bottle\n",
       }) {
    CAPTURE(text);
    CHECK_THROWS_AS(run_experiment(ExperimentConfig::parse(text)), Error);
  }
}

TEST_CASE("Schatten identity experiment on the circle") {
  const auto report = run_experiment(config("experiment = schatten-identity\nmodel = t1\nlevels = 6\nr = 0.5,1,2\n"));
  CHECK(report.status == CheckStatus::Pass);
  CHECK(report.cases.size() == 30);
}

TEST_CASE("Plancherel and trace experiments pass on the grid models") {
  for (const char* id : {"t1", "t2", "s2", "s3"}) {
    CAPTURE(id);
    CHECK(run_experiment(config(std::string("experiment = plancherel\nmodel = ") + id + "\n")).status ==
          CheckStatus::Pass);
    CHECK(run_experiment(config(std::string("experiment = trace-formula\nmodel = ") + id +
                                "\ntrials = 4\n"))
              .status == CheckStatus::Pass);
  }
}

TEST_CASE("invariance experiment separates invariant and perturbed operators") {
  const auto report = run_experiment(config("experiment = invariance\nmodel = so3-h2\ntrials = 20\n"));
  CHECK(report.status == CheckStatus::Pass);
  CHECK(label(report.cases[1], "truth") == "not invariant");
}

TEST_CASE("sub-Laplacian threshold cases either side of the homogeneous dimension") {
  const auto report = run_experiment(config("experiment = subelliptic-threshold\nalpha = 3.2,4.8\n"));
  REQUIRE(report.cases.size() == 2);
  CHECK(report.cases[0].verdict == Verdict::Divergent);
  CHECK(report.cases[1].verdict == Verdict::Convergent);
  CHECK(report.status == CheckStatus::Pass);
}

TEST_CASE("kernel Sobolev experiment reports its hypothesis") {
  const auto report = run_experiment(
      config("experiment = kernel-sobolev\nmodel = s2\nlevels = 400\nmu1 = 1\nmu2 = 0\ns = 2.3\nr = 1.1\n"));
  REQUIRE(report.cases.size() == 1);
  CHECK(label(report.cases[0], "hypothesis_met") == "true");
  CHECK(report.status == CheckStatus::Pass);
}

TEST_CASE("nuclearity sweep over alpha on the three-sphere") {
  auto cfg = config("experiment = nuclearity-threshold\nmodel = s3\nalpha = 3\nbasis_free = 1\n");
  const std::vector<double> alphas = {2.0, 2.4, 3.6, 4.5};
  const auto reports = sweep(cfg, "alpha", alphas, 2);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].cases[0].verdict == Verdict::Divergent);
  CHECK(reports[1].cases[0].verdict == Verdict::Divergent);
  CHECK(reports[2].cases[0].verdict == Verdict::Convergent);
  CHECK(reports[3].cases[0].verdict == Verdict::Convergent);
  for (std::size_t i = 0; i < alphas.size(); ++i) CHECK(reports[i].cases[0].value == alphas[i]);
  const auto csv = sweep_csv(reports, alphas);
  CHECK(csv.rfind("value,partial_sum,fitted_exponent,verdict\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("mixed norm grows with the Sobolev order along a sweep") {
  auto cfg = config("experiment = kernel-sobolev\nmodel = t1\nlevels = 200\nmu1 = 0\nmu2 = 0\ns = 3\nr = 1\n");
  const std::vector<double> mus = {0.0, 0.25, 0.5, 1.0, 1.5};
  const auto reports = sweep(cfg, "mu1", mus);
  for (std::size_t i = 1; i < reports.size(); ++i)
    CHECK(reports[i].cases[0].partial_sum >= reports[i - 1].cases[0].partial_sum);
}

TEST_CASE("Schroedinger threshold across anisotropy parameters") {
  const auto report = run_experiment(
      config("experiment = schrodinger-threshold\nalpha = 3.2,4.8\ngamma = 1.5,2,4\n"));
  REQUIRE(report.cases.size() == 6);
  for (std::size_t i = 0; i < 6; i += 2) {
    CHECK(report.cases[i].verdict == Verdict::Divergent);
    CHECK(report.cases[i + 1].verdict == Verdict::Convergent);
  }
}

TEST_CASE("reports are deterministic apart from wall time") {
  const auto cfg = config("experiment = trace-formula\nmodel = s2\nseed = 7\ntrials = 3\n");
  CHECK(run_experiment(cfg).to_json(false) == run_experiment(cfg).to_json(false));
  const auto a = sweep(cfg, "seed", {1, 2, 3}, 1);
  const auto b = sweep(cfg, "seed", {1, 2, 3}, 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a[i].to_json(false) == b[i].to_json(false));
  CHECK(a[0].to_json(false) != a[1].to_json(false));
}

TEST_CASE("report JSON echoes the configuration") {
  const auto report = run_experiment(config("experiment = plancherel\nmodel = s2\nseed = 9\ntrials = 2\n"));
  const auto json = report.to_json();
  CHECK(json.find("\"schema\": \"ellspec-report/1\"") != std::string::npos);
  CHECK(json.find("\"seed\": 9") != std::string::npos);
  CHECK(json.find("\"wall_time_seconds\"") != std::string::npos);
  CHECK(report.to_json(false).find("wall_time_seconds") == std::string::npos);
  CHECK(report.to_csv().rfind("case,value,partial_sum,fitted_exponent,verdict,status\n", 0) == 0);
}

TEST_CASE("reports are written to the output prefix") {
  const auto prefix = std::filesystem::temp_directory_path() / "ellspec_experiment_out";
  auto cfg = config("experiment = subelliptic-threshold\nalpha = 4.8\nlevels = 1000\n");
  cfg.output = prefix.string();
  run_experiment(cfg);
  for (const char* ext : {".json", ".csv", ".dat"}) {
    const std::filesystem::path p = prefix.string() + ext;
    CHECK(std::filesystem::exists(p));
    CHECK(std::filesystem::file_size(p) > 0);
    std::filesystem::remove(p);
  }
}
