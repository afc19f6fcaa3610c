#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hydrolim/catalog.hpp"
#include "hydrolim/equilibrium.hpp"
#include "hydrolim/errors.hpp"
#include "hydrolim/harness.hpp"
#include "hydrolim/metrics.hpp"
#include "hydrolim/rng.hpp"
#include "hydrolim/snapshot_io.hpp"
#include "hydrolim/zrp.hpp"

using namespace hydrolim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const ModelCatalog& catalog() {
  static const ModelCatalog cat = ModelCatalog::builtin();
  return cat;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hydrolim_harness_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small baseline configuration shared by the harness smoke tests.
ExperimentConfig tiny_config(const std::string& out_name) {
  ExperimentConfig cfg;
  cfg.model = "zrp-linear";
  cfg.n_values = {8, 16};
  cfg.pde_grid = 32;
  cfg.horizon = 0.02;
  cfg.checkpoint_count = 3;
  cfg.replicas = 8;
  cfg.dictionary_k = 2;
  cfg.ell_values = {2};
  cfg.seed = 4242;
  cfg.threads = 1;
  cfg.out_dir = fresh_dir(out_name).string();
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

TEST_CASE("config defaults and field mapping") {
  const auto cfg = ExperimentConfig::from_json_text("{}");
  CHECK(cfg.model == "zrp-linear");
  CHECK(cfg.kernel == "kernel-nn-symmetric");
  CHECK(cfg.n_values == std::vector<int>{32, 64, 128, 256});
  CHECK(cfg.checkpoint_count == 11);
  CHECK(cfg.glk_diffusivity == 0.5);
  CHECK(cfg.format == "csv");

  const auto custom = ExperimentConfig::from_json_text(
      R"({"checkpoints": 5, "profile": {"mean": 2.0, "amplitude": 0.25, "mode": 2},
          "n_values": [16, 64], "seed": 7})");
  CHECK(custom.checkpoint_count == 5);
  CHECK(custom.profile_mean == 2.0);
  CHECK(custom.profile_amplitude == 0.25);
  CHECK(custom.profile_mode == 2);
  CHECK(custom.seed == 7);
}

TEST_CASE("unknown keys and malformed values are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"profile": {"amp": 0.5}})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"profile": 3})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"replicas": 1.5})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"seed": -5})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"n_values": [32, "x"]})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"keep_snapshots": "yes"})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{not json"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("validation rejects out-of-range settings") {
  const auto expect_reject = [](void (*mut)(ExperimentConfig&)) {
    ExperimentConfig cfg;
    mut(cfg);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  };
  expect_reject([](ExperimentConfig& c) { c.block_rule = "bogus"; });
  expect_reject([](ExperimentConfig& c) { c.format = "xml"; });
  expect_reject([](ExperimentConfig& c) { c.n_values = {64, 32}; });
  expect_reject([](ExperimentConfig& c) { c.n_values = {}; });
  expect_reject([](ExperimentConfig& c) { c.ell_values = {0, 2}; });
  expect_reject([](ExperimentConfig& c) { c.checkpoint_count = 1; });
  expect_reject([](ExperimentConfig& c) { c.horizon = 0.0; });
  expect_reject([](ExperimentConfig& c) { c.coupling_init = "bogus"; });
  expect_reject([](ExperimentConfig& c) { c.initial_data = "bogus"; });
  expect_reject([](ExperimentConfig& c) { c.glk_dt = -0.1; });
  expect_reject([](ExperimentConfig& c) { c.pde_grid = 4; });
  expect_reject([](ExperimentConfig& c) { c.threads = -1; });
  expect_reject([](ExperimentConfig& c) { c.out_dir = ""; });
}

// ---------------------------------------------------------------------------
// validate command
// ---------------------------------------------------------------------------

TEST_CASE("validate command checks every builtin model against its declaration") {
  ExperimentConfig cfg = tiny_config("validate_all");
  cfg.model = "all";
  const auto art = run_validate(cfg, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  CHECK(report.at("command") == "validate");
  CHECK(report.at("passed") == true);
  REQUIRE(report.at("models").size() == 5);
  bool saw_constant = false;
  for (const auto& m : report.at("models")) {
    CHECK(m.at("declaration_consistent") == true);
    if (m.at("model") == "zrp-constant") {
      saw_constant = true;
      CHECK(m.at("all_clauses_passed") == false);
      CHECK(m.at("declared_satisfied") == false);
    }
  }
  CHECK(saw_constant);
  REQUIRE(report.at("kernels").size() == 1);
  CHECK(report.at("kernels")[0].at("centred") == true);
  CHECK(!art.curves.rows.empty());

  ExperimentConfig bad = cfg;
  bad.model = "no-such-model";
  CHECK_THROWS_AS(run_validate(bad, catalog()), ConfigError);
}

TEST_CASE("drifting kernels are rejected for the diffusive limit") {
  const auto drifted = ModelCatalog::from_json_text(R"({
    "models": {
      "zrp-linear": {
        "kind": "zrp",
        "rate": { "form": "linear" },
        "hzrp": { "lipschitz": 1.0, "gap_n0": 1, "gap_beta": 1.0, "monotone": true, "satisfied": true }
      }
    },
    "kernels": {
      "kernel-nn-symmetric": {
        "offsets": [
          { "displacement": 1, "probability": 0.75 },
          { "displacement": -1, "probability": 0.25 }
        ]
      }
    }
  })");
  const ExperimentConfig cfg = tiny_config("drift_kernel");
  CHECK_THROWS_AS(run_convergence(cfg, drifted), ConfigError);
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

TEST_CASE("convergence sweep runs, reports per-cell results, and is deterministic") {
  ExperimentConfig cfg = tiny_config("converge_det");
  const auto a = run_convergence(cfg, catalog());
  const auto b = run_convergence(cfg, catalog());
  CHECK(a.report_text == b.report_text);
  CHECK(a.curves.rows == b.curves.rows);

  ExperimentConfig threaded = cfg;
  threaded.threads = 4;
  threaded.out_dir = fresh_dir("converge_det_threads").string();
  const auto c = run_convergence(threaded, catalog());
  // The report echoes only run-defining configuration, so byte identity
  // holds across thread counts.
  CHECK(a.report_text == c.report_text);
  CHECK(a.curves.rows == c.curves.rows);

  const json report = json::parse(a.report_text);
  CHECK(report.at("command") == "converge");
  CHECK(report.at("kind") == "zrp");
  CHECK(report.at("diffusivity") == 0.5);
  REQUIRE(report.at("cells").size() == 2);
  for (const auto& cell : report.at("cells")) {
    CHECK(cell.at("status") == "ok");
    CHECK(cell.at("per_checkpoint_discrepancy").size() == 3);
    CHECK(cell.at("w1_per_checkpoint").size() == 3);
    const auto& rd = cell.at("replica_discrepancy");
    CHECK(rd.at("per_checkpoint").size() == 3);
    // A single replica deviates at least as much as the replica mean does:
    // |mean - target| <= mean |single - target| entrywise, hence also after
    // the max over the dictionary and the time average.
    CHECK(rd.at("time_avg").get<double>() >=
          cell.at("time_avg_discrepancy").get<double>());
  }
  CHECK(report.at("decay").at("statistic") == "replica_discrepancy");
  CHECK(a.curves.header ==
        std::vector<std::string>{"n", "t", "function_id", "estimate", "stderr", "pde_value",
                                 "abs_error"});
}

TEST_CASE("glk convergence sweep records integrator step information") {
  ExperimentConfig cfg = tiny_config("converge_glk");
  cfg.model = "glk-gaussian";
  cfg.replicas = 6;
  cfg.glk_dt = 0.05;
  const auto art = run_convergence(cfg, catalog());
  const json report = json::parse(art.report_text);
  CHECK(report.at("kind") == "glk");
  CHECK(report.at("diffusivity") == 0.5);
  for (const auto& cell : report.at("cells")) {
    CHECK(cell.at("status") == "ok");
    CHECK(cell.at("dt_halvings") == 0);
    CHECK(!cell.contains("w1_per_checkpoint"));  // undefined for signed spins
  }
}

TEST_CASE("kept snapshots reproduce the reported pairings") {
  ExperimentConfig cfg = tiny_config("converge_snapshots");
  cfg.n_values = {16};
  cfg.replicas = 4;
  cfg.keep_snapshots = true;
  const auto art = run_convergence(cfg, catalog());
  const json report = json::parse(art.report_text);
  const auto times = report.at("provenance").at("checkpoint_times").get<std::vector<double>>();
  REQUIRE(times.size() == 3);

  const ObservableDictionary dict(cfg.dictionary_k);
  const int cos1 = dict.index_of("cos1");
  std::vector<double> recomputed(times.size(), 0.0);
  for (int r = 0; r < cfg.replicas; ++r) {
    const fs::path file =
        fs::path(cfg.out_dir) / "snapshots" / ("converge_n16_r" + std::to_string(r) + ".bin");
    REQUIRE(fs::exists(file));
    const auto traj = read_int64_trajectory_binary(file);
    REQUIRE(traj.times.size() == times.size());
    REQUIRE(traj.columns.size() == times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
      CHECK(traj.times[j] == doctest::Approx(times[j]).epsilon(1e-15));
      REQUIRE(traj.columns[j].size() == 16);
      recomputed[j] += dict.pair_field(cos1, std::span<const std::int64_t>(traj.columns[j]));
    }
  }
  for (double& v : recomputed) v /= cfg.replicas;

  // Match the curves rows for n = 16 / cos1 checkpoint by checkpoint.
  std::size_t matched = 0;
  for (const auto& row : art.curves.rows) {
    if (row[0] != "16" || row[2] != "cos1") continue;
    const double t = std::stod(row[1]);
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (std::abs(t - times[j]) < 1e-15) {
        CHECK(std::stod(row[3]) == doctest::Approx(recomputed[j]).epsilon(1e-12).scale(1.0));
        ++matched;
      }
    }
  }
  CHECK(matched == times.size());
}

// ---------------------------------------------------------------------------
// concentrate
// ---------------------------------------------------------------------------

TEST_CASE("concentration with a generous threshold passes with empty tails") {
  ExperimentConfig cfg = tiny_config("concentrate_loose");
  cfg.replicas = 16;
  cfg.epsilon = 50.0;
  const auto art = run_concentration(cfg, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  CHECK(report.at("command") == "concentrate");
  for (const auto& cell : report.at("cells")) {
    for (const auto& row : cell.at("table")) {
      CHECK(row.at("exceedances") == 0);
      CHECK(row.at("trials") == 16);
    }
  }
  // Wilson bounds in the curves are reproducible from the counts.
  for (const auto& row : art.curves.rows) {
    const auto exceed = static_cast<std::int64_t>(std::stoll(row[2]));
    const auto trials = static_cast<std::int64_t>(std::stoll(row[3]));
    const auto w = wilson_interval(exceed, trials);
    CHECK(std::stod(row[4]) == doctest::Approx(w.point).epsilon(1e-12).scale(1.0));
    CHECK(std::stod(row[5]) == doctest::Approx(w.lo).epsilon(1e-12).scale(1.0));
    CHECK(std::stod(row[6]) == doctest::Approx(w.hi).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("concentration rejects observables outside the dictionary") {
  ExperimentConfig cfg = tiny_config("concentrate_bad_obs");
  cfg.observable = "cos99";
  CHECK_THROWS_AS(run_concentration(cfg, catalog()), ConfigError);
}

// ---------------------------------------------------------------------------
// couple
// ---------------------------------------------------------------------------

TEST_CASE("identical coupled copies report an identically zero distance") {
  for (const char* model : {"zrp-linear", "glk-gaussian"}) {
    CAPTURE(model);
    ExperimentConfig cfg = tiny_config(std::string("couple_identical_") + model);
    cfg.model = model;
    cfg.n_values = {8};
    cfg.replicas = 6;
    cfg.coupling_init = "identical";
    cfg.glk_dt = 0.05;
    const auto art = run_coupling_test(cfg, catalog());
    CHECK(art.passed);
    const json report = json::parse(art.report_text);
    CHECK(report.at("cells")[0].at("identically_zero") == true);
  }
}

TEST_CASE("a single extra particle keeps the coupled distance flat") {
  ExperimentConfig cfg = tiny_config("couple_one_particle");
  cfg.n_values = {8};
  cfg.replicas = 8;
  cfg.coupling_init = "one-particle";
  const auto art = run_coupling_test(cfg, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  const auto& cell = report.at("cells")[0];
  CHECK(cell.at("identically_zero") == false);
  CHECK(cell.at("l1").at("non_increasing") == true);
  for (const auto& m : cell.at("l1").at("means"))
    CHECK(m.get<double>() == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("one-particle coupling is a zero-range-only construction") {
  ExperimentConfig cfg = tiny_config("couple_one_particle_glk");
  cfg.model = "glk-gaussian";
  cfg.coupling_init = "one-particle";
  CHECK_THROWS_AS(run_coupling_test(cfg, catalog()), ConfigError);
}

TEST_CASE("shifted-profile coupling contracts for both families") {
  ExperimentConfig zrp = tiny_config("couple_shifted_zrp");
  zrp.n_values = {8};
  zrp.replicas = 8;
  zrp.horizon = 0.05;
  const auto art_zrp = run_coupling_test(zrp, catalog());
  CHECK(art_zrp.passed);

  ExperimentConfig glk = tiny_config("couple_shifted_glk");
  glk.model = "glk-gaussian";
  glk.n_values = {8};
  glk.replicas = 6;
  glk.horizon = 0.05;
  glk.glk_dt = 0.05;
  const auto art_glk = run_coupling_test(glk, catalog());
  CHECK(art_glk.passed);
  const json report = json::parse(art_glk.report_text);
  const auto& l2 = report.at("cells")[0].at("l2");
  CHECK(l2.at("contraction_rate").get<double>() > 0.0);
}

// ---------------------------------------------------------------------------
// invariance
// ---------------------------------------------------------------------------

TEST_CASE("equilibrium start stays in equilibrium for the zero-range chain") {
  ExperimentConfig cfg = tiny_config("invariance_zrp");
  cfg.n_values = {16};
  cfg.replicas = 150;
  cfg.horizon = 0.05;
  const auto art = run_invariance_test(cfg, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  CHECK(report.at("fugacity").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(art.curves.rows.size() == 4);
  for (const auto& row : art.curves.rows) CHECK(std::abs(std::stod(row[5])) < 4.0);
}

TEST_CASE("glk invariance reports the halved-step comparison") {
  ExperimentConfig cfg = tiny_config("invariance_glk");
  cfg.model = "glk-gaussian";
  cfg.profile_mean = 0.0;
  cfg.n_values = {8};
  cfg.replicas = 120;
  cfg.horizon = 0.05;
  cfg.glk_dt = 0.02;
  const auto art = run_invariance_test(cfg, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  const auto& cell = report.at("cells")[0];
  CHECK(cell.at("dt_micro") == 0.02);
  CHECK(cell.at("halved_dt").at("dt_micro") == 0.01);
  CHECK(cell.at("halved_dt").contains("m2_drift_ratio"));
}

TEST_CASE("the drift statistic flags a mismatched generator") {
  // Product Poisson is invariant for the linear rate but not for the
  // indicator rate; running the wrong dynamics from a Poisson start must
  // push the second moment up by many standard errors.
  const auto eq = EquilibriumStructure::for_zrp(catalog().zrp("zrp-linear").rate);
  const auto& wrong_rate = catalog().zrp("zrp-constant").rate;
  const auto kernel = TransitionKernel::nearest_neighbour_symmetric();
  const int n = 16, replicas = 800;
  const double t_end = 0.1;
  const std::vector<double> checkpoints = {t_end};
  Rng rng(2468);
  double acc = 0.0, acc_sq = 0.0;
  for (int r = 0; r < replicas; ++r) {
    std::vector<std::int64_t> occ(static_cast<std::size_t>(n));
    double m2_before = 0.0;
    for (auto& k : occ) {
      k = static_cast<std::int64_t>(eq.sample_site(1.0, rng));
      m2_before += static_cast<double>(k * k);
    }
    m2_before /= n;
    const auto snaps =
        simulate_zrp(ZrpConfiguration(occ), kernel, wrong_rate, t_end, checkpoints, rng);
    double m2_after = 0.0;
    for (std::int64_t k : snaps[0].occupation) m2_after += static_cast<double>(k * k);
    m2_after /= n;
    const double d = m2_after - m2_before;
    acc += d;
    acc_sq += d * d;
  }
  const double drift = acc / replicas;
  const double sd = std::sqrt(std::max(acc_sq / replicas - drift * drift, 1e-30));
  const double z = drift / (sd / std::sqrt(static_cast<double>(replicas)));
  CHECK(z > 4.0);
}

// ---------------------------------------------------------------------------
// ensembles
// ---------------------------------------------------------------------------

TEST_CASE("ensembles error is exactly zero for affine flux families") {
  ExperimentConfig zrp = tiny_config("ensembles_linear");
  zrp.ell_values = {2, 3};
  zrp.canonical_samples = 200;
  zrp.canonical_mass = 1.0;
  const auto art = run_ensembles_study(zrp, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  CHECK(report.at("flux_affine") == true);
  CHECK(report.at("exact_zero") == true);
  CHECK(report.at("rate_fit").is_null());
  CHECK(report.at("max_abs_error").get<double>() <= 1e-9);
  for (const auto& row : report.at("table")) CHECK(row.at("stderr").get<double>() == 0.0);

  ExperimentConfig glk = tiny_config("ensembles_glk");
  glk.model = "glk-gaussian";
  glk.ell_values = {2, 3};
  glk.canonical_samples = 100;
  glk.canonical_mass = 0.4;
  const auto art_glk = run_ensembles_study(glk, catalog());
  CHECK(art_glk.passed);
  CHECK(json::parse(art_glk.report_text).at("exact_zero") == true);
}

TEST_CASE("ensembles error matches the stars-and-bars defect for the indicator rate") {
  ExperimentConfig cfg = tiny_config("ensembles_constant");
  cfg.model = "zrp-constant";
  cfg.ell_values = {2, 4, 8};
  cfg.canonical_samples = 3000;
  cfg.canonical_mass = 1.0;
  const auto art = run_ensembles_study(cfg, catalog());
  const json report = json::parse(art.report_text);
  CHECK(report.at("flux_affine") == false);
  CHECK(!report.at("rate_fit").is_null());
  const double expected[] = {1.0 / 18.0, 1.0 / 34.0, 1.0 / 66.0};
  const auto& table = report.at("table");
  REQUIRE(table.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double est = table[i].at("estimate").get<double>();
    const double se = table[i].at("stderr").get<double>();
    CHECK(se > 0.0);
    CHECK(std::abs(est - expected[i]) < 4.0 * se + 1e-3);
  }
}

TEST_CASE("ensembles rejects non-integer canonical masses for particles") {
  ExperimentConfig cfg = tiny_config("ensembles_bad_mass");
  cfg.ell_values = {2};
  cfg.canonical_mass = 0.3;  // 1.5 particles in a window of 5 sites
  CHECK_THROWS_AS(run_ensembles_study(cfg, catalog()), ConfigError);
}

// ---------------------------------------------------------------------------
// lln
// ---------------------------------------------------------------------------

TEST_CASE("consistency statistic is exactly zero under the linear rate") {
  ExperimentConfig cfg = tiny_config("lln_linear");
  cfg.lln_n = 64;
  cfg.lln_samples = 50;
  cfg.ell_values = {2, 4};
  const auto art = run_lln_study(cfg, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  CHECK(report.at("flux_affine") == true);
  CHECK(report.at("paper_ell") == 3);  // round(64^{1/4})
  CHECK(report.at("max_abs_stat").get<double>() <= 1e-9);
  REQUIRE(art.curves.rows.size() == 3);  // configured ells plus the N^{1/4} rule
  int paper_rows = 0;
  for (const auto& row : art.curves.rows)
    if (row[4] == "1") ++paper_rows;
  CHECK(paper_rows == 1);
}

TEST_CASE("consistency norm decays like the inverse square root of the window") {
  ExperimentConfig cfg = tiny_config("lln_constant");
  cfg.model = "zrp-constant";
  cfg.lln_n = 256;
  cfg.lln_samples = 300;
  cfg.ell_values = {2, 4, 8};
  const auto art = run_lln_study(cfg, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  CHECK(report.at("flux_affine") == false);
  const auto& fit = report.at("rate_fit");
  REQUIRE(!fit.is_null());
  CHECK(fit.at("ci_lo").get<double>() <= -0.5);
  CHECK(fit.at("ci_hi").get<double>() >= -0.5);
}

TEST_CASE("lln rejects blocks wider than the lattice") {
  ExperimentConfig cfg = tiny_config("lln_bad_block");
  cfg.lln_n = 8;
  cfg.ell_values = {2, 8};
  CHECK_THROWS_AS(run_lln_study(cfg, catalog()), ConfigError);
}

// ---------------------------------------------------------------------------
// pde
// ---------------------------------------------------------------------------

TEST_CASE("pde study verifies mass, comparison, and refinement order") {
  ExperimentConfig cfg = tiny_config("pde_study");
  cfg.pde_grid = 64;
  cfg.horizon = 0.05;
  cfg.checkpoint_count = 5;
  cfg.keep_snapshots = true;
  const auto art = run_pde_study(cfg, catalog());
  CHECK(art.passed);
  const json report = json::parse(art.report_text);
  CHECK(report.at("command") == "pde");
  const double order = report.at("refinement").at("order").get<double>();
  CHECK(order == doctest::Approx(2.0).epsilon(0.2));
  CHECK(art.curves.rows.size() == 5);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "snapshots" / "pde_profiles_m64.bin"));
  const auto traj =
      read_double_trajectory_binary(fs::path(cfg.out_dir) / "snapshots" / "pde_profiles_m64.bin");
  REQUIRE(traj.columns.size() == 5);
  CHECK(traj.columns[0].size() == 64);
}

// ---------------------------------------------------------------------------
// artifacts
// ---------------------------------------------------------------------------

TEST_CASE("artifacts are written in both formats") {
  ExperimentConfig cfg = tiny_config("artifacts_csv");
  cfg.model = "all";
  const auto art = run_validate(cfg, catalog());
  write_artifacts(art, cfg);
  {
    std::ifstream in(fs::path(cfg.out_dir) / "report.json");
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == art.report_text);
  }
  {
    std::ifstream in(fs::path(cfg.out_dir) / "curves.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "model,clause,passed,witness,detail");
  }

  ExperimentConfig jcfg = cfg;
  jcfg.format = "json";
  jcfg.out_dir = fresh_dir("artifacts_json").string();
  write_artifacts(art, jcfg);
  std::ifstream in(fs::path(jcfg.out_dir) / "curves.json");
  REQUIRE(in.good());
  const json curves = json::parse(in);
  REQUIRE(curves.is_array());
  REQUIRE(!curves.empty());
  CHECK(curves[0].contains("model"));
  CHECK(curves[0].contains("clause"));
}
