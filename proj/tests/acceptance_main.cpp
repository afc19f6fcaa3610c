// Acceptance gate for the toolkit.  Runs eleven end-to-end criteria and
// prints exactly one line per criterion:
//
//   [PASS] 01 equilibrium-round-trip  max|R(sigma(rho))-rho|=2.1e-13 ...
//
// The process exit code equals the number of failed criteria, so the gate
// can drive CI directly.  Every tolerance is pinned in this file.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hydrolim/catalog.hpp"
#include "hydrolim/equilibrium.hpp"
#include "hydrolim/harness.hpp"
#include "hydrolim/metrics.hpp"
#include "hydrolim/pde.hpp"
#include "hydrolim/profile.hpp"
#include "hydrolim/rng.hpp"
#include "hydrolim/zrp.hpp"

using namespace hydrolim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

const ModelCatalog& catalog() {
  static const ModelCatalog cat = ModelCatalog::builtin();
  return cat;
}

EquilibriumStructure eq_for(const std::string& name) {
  if (catalog().has_zrp(name)) return EquilibriumStructure::for_zrp(catalog().zrp(name).rate);
  return EquilibriumStructure::for_glk(catalog().glk(name).potential);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hydrolim_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig base_config(const std::string& out_name) {
  ExperimentConfig cfg;
  cfg.seed = 20260814;
  cfg.threads = 0;
  cfg.out_dir = scratch(out_name).string();
  return cfg;
}

double max_abs_z(const CurveTable& curves, int z_column) {
  double m = 0.0;
  for (const auto& row : curves.rows)
    m = std::max(m, std::abs(std::stod(row[static_cast<std::size_t>(z_column)])));
  return m;
}

// ---------------------------------------------------------------------------
// 1. Equilibrium round trip on 50-point grids, all five catalog models
// ---------------------------------------------------------------------------

Outcome criterion_round_trip() {
  const double tol = 1e-9;
  double worst = 0.0;
  for (const std::string name :
       {"zrp-linear", "zrp-constant", "zrp-capped", "glk-gaussian", "glk-perturbed"}) {
    const auto eq = eq_for(name);
    const bool zrp = catalog().has_zrp(name);
    for (int i = 0; i < 50; ++i) {
      const double u = static_cast<double>(i) / 49.0;
      // log grid over [1e-3, 5] for particle densities, linear [-3, 3] for
      // spins.
      const double rho = zrp ? 1e-3 * std::pow(5000.0, u) : -3.0 + 6.0 * u;
      worst = std::max(worst, std::abs(eq.mean_density(eq.sigma(rho)) - rho));
    }
  }
  return {worst < tol, "max|R(sigma(rho))-rho|=" + num(worst) + " tol=1e-9 grids=5x50"};
}

// ---------------------------------------------------------------------------
// 2. Closed forms for sigma
// ---------------------------------------------------------------------------

Outcome criterion_closed_forms() {
  const double tol = 1e-9;
  const auto lin = eq_for("zrp-linear");
  const auto gau = eq_for("glk-gaussian");
  const auto con = eq_for("zrp-constant");
  double worst = 0.0;
  for (double rho : {0.1, 0.5, 1.0, 2.0, 4.0})
    worst = std::max(worst, std::abs(lin.sigma(rho) - rho));
  for (double rho : {-1.3, -0.2, 0.7, 2.0})
    worst = std::max(worst, std::abs(gau.sigma(rho) - rho));
  worst = std::max(worst, std::abs(con.sigma(1.0) - 0.5));
  return {worst < tol, "max closed-form defect=" + num(worst) + " tol=1e-9"};
}

// ---------------------------------------------------------------------------
// 3. Invariance of the product equilibria, with glk step-halving check
// ---------------------------------------------------------------------------

Outcome criterion_invariance() {
  ExperimentConfig zrp = base_config("inv_zrp");
  zrp.model = "zrp-linear";
  zrp.n_values = {64};
  zrp.horizon = 0.1;
  zrp.replicas = 1000;
  const auto art_zrp = run_invariance_test(zrp, catalog());
  const double z_zrp = max_abs_z(art_zrp.curves, 5);

  ExperimentConfig glk = base_config("inv_glk");
  glk.model = "glk-gaussian";
  glk.profile_mean = 0.0;
  glk.n_values = {32};
  glk.horizon = 0.1;
  glk.replicas = 400;
  glk.glk_dt = 0.02;
  const auto art_glk = run_invariance_test(glk, catalog());
  const double z_glk = max_abs_z(art_glk.curves, 5);
  const json rep = json::parse(art_glk.report_text);
  const bool halved_present = rep.at("cells")[0].contains("halved_dt");

  return {art_zrp.passed && art_glk.passed && halved_present,
          "max|z| zrp=" + num(z_zrp) + " glk=" + num(z_glk) + " bound=4 halved-dt=" +
              (halved_present ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 4. Coupling contraction for both families
// ---------------------------------------------------------------------------

Outcome criterion_coupling() {
  ExperimentConfig zrp = base_config("couple_zrp");
  zrp.model = "zrp-linear";
  zrp.n_values = {64};
  zrp.horizon = 0.1;
  zrp.checkpoint_count = 11;
  zrp.replicas = 200;
  zrp.coupling_init = "shifted-profile";
  const auto art_zrp = run_coupling_test(zrp, catalog());

  ExperimentConfig glk = base_config("couple_glk");
  glk.model = "glk-gaussian";
  glk.n_values = {64};
  glk.horizon = 0.1;
  glk.checkpoint_count = 11;
  glk.replicas = 200;
  glk.coupling_init = "shifted-profile";
  const auto art_glk = run_coupling_test(glk, catalog());
  const json rep = json::parse(art_glk.report_text);
  const double rate = rep.at("cells")[0].at("l2").at("contraction_rate").get<double>();

  return {art_zrp.passed && art_glk.passed,
          "zrp l1 non-increasing (3 SE), glk l2 contraction rate=" + num(rate) + " (>0)"};
}

// ---------------------------------------------------------------------------
// 5. Two-site mass-2 chain against the brute-force CTMC stationary law
// ---------------------------------------------------------------------------

Outcome criterion_small_instance() {
  // Exact stationary law of occ_0 over {2, 1, 0} is (1/4, 1/2, 1/4); the
  // chain's slowest relaxation rate is 8, so T=1 is fully mixed.
  const auto& rate = catalog().zrp("zrp-linear").rate;
  const auto kernel = TransitionKernel::nearest_neighbour_symmetric();
  const int replicas = 4000;
  const std::vector<double> end = {1.0};
  Rng rng(97531);
  int counts[3] = {0, 0, 0};
  for (int r = 0; r < replicas; ++r) {
    const auto snaps = simulate_zrp(ZrpConfiguration({1, 1}), kernel, rate, 1.0, end, rng);
    counts[2 - snaps[0].occupation[0]] += 1;
  }
  const double pi[3] = {0.25, 0.5, 0.25};
  double worst_z = 0.0;
  for (int s = 0; s < 3; ++s) {
    const double se = std::sqrt(pi[s] * (1.0 - pi[s]) / replicas);
    worst_z = std::max(worst_z, std::abs(counts[s] / double(replicas) - pi[s]) / se);
  }
  return {worst_z < 3.0, "max|z| over states=" + num(worst_z) + " bound=3 replicas=4000"};
}

// ---------------------------------------------------------------------------
// 6. PDE solver: heat decay, mass conservation, refinement order
// ---------------------------------------------------------------------------

Outcome criterion_pde() {
  const ScalarFn identity = [](double r) { return r; };
  const double t_end = 0.05;
  const std::vector<double> end = {t_end};
  const auto f0 = [](double u) { return 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * u); };

  // Mode decay at M=256 against 0.5 exp(-4 pi^2 t).
  const auto sol = pde_solve(MacroProfile::from_function(256, f0), identity, 1.0, 1.0, t_end, end);
  const ObservableDictionary dict(1);
  const double amp = 2.0 * dict.pair_profile(dict.index_of("cos1"), sol.back());
  const double exact = 0.5 * std::exp(-4.0 * std::numbers::pi * std::numbers::pi * t_end);
  const double rel = std::abs(amp - exact) / exact;

  // Mass over 1e5 explicit steps at the admissible limit.
  MacroProfile f = MacroProfile::from_function(256, f0);
  const double mass0 = f.mass();
  const double dt = cfl_limit(256, 1.0, 1.0);
  for (int s = 0; s < 100000; ++s) pde_step(f, identity, 1.0, 1.0, dt);
  const double mass_rel = std::abs(f.mass() - mass0) / mass0;

  // Observed order from errors at M in {32, 64, 128} against the exact
  // heat-mode solution.
  double errs[3];
  const int grids[3] = {32, 64, 128};
  for (int i = 0; i < 3; ++i) {
    const auto si =
        pde_solve(MacroProfile::from_function(grids[i], f0), identity, 1.0, 1.0, t_end, end);
    double e = 0.0;
    for (int x = 0; x < grids[i]; ++x) {
      const double u = static_cast<double>(x) / grids[i];
      const double exact_val =
          1.0 + exact * std::cos(2.0 * std::numbers::pi * u);
      e = std::max(e, std::abs(si.back().values[static_cast<std::size_t>(x)] - exact_val));
    }
    errs[i] = e;
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  const double order = std::min(order1, order2);

  const bool ok = rel < 1e-3 && mass_rel < 1e-12 && order >= 1.8;
  return {ok, "mode rel err=" + num(rel) + " (<1e-3), mass rel drift=" + num(mass_rel) +
                  " (<1e-12, 1e5 steps), order=" + num(order) + " (>=1.8)"};
}

// ---------------------------------------------------------------------------
// 7. Equivalence of ensembles
// ---------------------------------------------------------------------------

Outcome criterion_ensembles() {
  ExperimentConfig lin = base_config("ens_lin");
  lin.model = "zrp-linear";
  lin.ell_values = {2, 4, 8, 16, 32};
  lin.canonical_mass = 1.0;
  lin.canonical_samples = 1000;
  const auto art_lin = run_ensembles_study(lin, catalog());
  const json rep_lin = json::parse(art_lin.report_text);
  const double max_abs = rep_lin.at("max_abs_error").get<double>();

  ExperimentConfig con = base_config("ens_con");
  con.model = "zrp-constant";
  con.ell_values = {2, 4, 8, 16, 32};
  con.canonical_mass = 1.0;
  con.canonical_samples = 10000;
  const auto art_con = run_ensembles_study(con, catalog());
  const json rep_con = json::parse(art_con.report_text);
  std::string slope = "fit-failed";
  if (!rep_con.at("rate_fit").is_null()) {
    slope = num(rep_con.at("rate_fit").at("slope").get<double>()) + " CI[" +
            num(rep_con.at("rate_fit").at("ci_lo").get<double>()) + "," +
            num(rep_con.at("rate_fit").at("ci_hi").get<double>()) + "]";
  }
  return {art_lin.passed && art_con.passed,
          "linear max|err|=" + num(max_abs) + " (<=1e-9 all ell), indicator slope=" + slope +
              " (CI in [-1.5,-0.5], 1e4 samples)"};
}

// ---------------------------------------------------------------------------
// 8. Block-average LLN scaling of the consistency statistic
// ---------------------------------------------------------------------------

Outcome criterion_lln() {
  ExperimentConfig lin = base_config("lln_lin");
  lin.model = "zrp-linear";
  lin.lln_n = 1024;
  lin.lln_samples = 200;
  lin.ell_values = {2, 4, 8, 16, 32};
  const auto art_lin = run_lln_study(lin, catalog());
  const double max_stat = json::parse(art_lin.report_text).at("max_abs_stat").get<double>();

  ExperimentConfig con = base_config("lln_con");
  con.model = "zrp-constant";
  con.lln_n = 1024;
  con.lln_samples = 4000;
  con.ell_values = {2, 4, 8, 16, 32};
  const auto art_con = run_lln_study(con, catalog());
  const json fit = json::parse(art_con.report_text).at("rate_fit");
  std::string slope = "fit-failed";
  if (!fit.is_null())
    slope = num(fit.at("slope").get<double>()) + " CI[" + num(fit.at("ci_lo").get<double>()) +
            "," + num(fit.at("ci_hi").get<double>()) + "]";

  return {art_lin.passed && art_con.passed,
          "linear max stat=" + num(max_stat) + " (<=1e-9), nonlinear slope=" + slope +
              " (CI must contain -0.5)"};
}

// ---------------------------------------------------------------------------
// 9. Hydrodynamic convergence sweep for both families
// ---------------------------------------------------------------------------

Outcome criterion_convergence() {
  std::string detail;
  bool ok = true;
  for (const std::string model : {"zrp-linear", "glk-gaussian"}) {
    ExperimentConfig cfg = base_config("conv_" + model);
    cfg.model = model;
    cfg.n_values = {32, 64, 128, 256};
    cfg.replicas = 200;
    cfg.horizon = 0.1;
    cfg.checkpoint_count = 11;
    cfg.pde_grid = 256;
    cfg.dictionary_k = 8;
    const auto art = run_convergence(cfg, catalog());
    const json rep = json::parse(art.report_text);
    std::string slope = "fit-failed";
    if (!rep.at("rate_fit").is_null())
      slope = num(rep.at("rate_fit").at("slope").get<double>()) + " ci_hi=" +
              num(rep.at("rate_fit").at("ci_hi").get<double>());
    const bool strict = rep.at("decay").at("all_strict").get<bool>();
    if (!detail.empty()) detail += "; ";
    detail += model + ": strict-decay=" + (strict ? "yes" : "no") + " slope=" + slope;
    ok = ok && art.passed;
  }
  return {ok, detail + " (gaps>2 SE, slope CI<0, N=32..256, 200 replicas)"};
}

// ---------------------------------------------------------------------------
// 10. Concentration exceedances monotone in N
// ---------------------------------------------------------------------------

Outcome criterion_concentration() {
  ExperimentConfig cfg = base_config("conc");
  cfg.model = "zrp-linear";
  cfg.n_values = {32, 64, 128, 256};
  cfg.replicas = 200;
  cfg.horizon = 0.1;
  cfg.checkpoint_count = 11;
  cfg.epsilon = 0.1;
  const auto art = run_concentration(cfg, catalog());
  const json rep = json::parse(art.report_text);
  int ok_checkpoints = 0;
  for (const auto& b : rep.at("monotone_per_checkpoint"))
    if (b.get<bool>()) ++ok_checkpoints;
  return {art.passed, "monotone checkpoints=" + std::to_string(ok_checkpoints) + "/11 " +
                          "(Wilson overlap rule, eps=0.1)"};
}

// ---------------------------------------------------------------------------
// 11. Byte-identical reports for identical config and seed
// ---------------------------------------------------------------------------

Outcome criterion_determinism() {
  ExperimentConfig cfg = base_config("det_a");
  cfg.model = "zrp-linear";
  cfg.n_values = {8, 16};
  cfg.pde_grid = 32;
  cfg.horizon = 0.02;
  cfg.checkpoint_count = 3;
  cfg.replicas = 8;
  cfg.dictionary_k = 2;
  const auto a = run_convergence(cfg, catalog());
  write_artifacts(a, cfg);

  ExperimentConfig cfg_b = cfg;
  cfg_b.out_dir = scratch("det_b").string();
  const auto b = run_convergence(cfg_b, catalog());
  write_artifacts(b, cfg_b);

  const auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string ra = read_file(fs::path(cfg.out_dir) / "report.json");
  const std::string rb = read_file(fs::path(cfg_b.out_dir) / "report.json");
  const bool same = !ra.empty() && ra == rb;

  const auto v1 = run_validate(cfg, catalog());
  const auto v2 = run_validate(cfg, catalog());
  const bool same_validate = v1.report_text == v2.report_text;

  return {same && same_validate,
          std::string("converge report bytes equal=") + (same ? "yes" : "no") +
              ", validate bytes equal=" + (same_validate ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 means no pinned runtime
  std::function<Outcome()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "equilibrium-round-trip", 1.0, criterion_round_trip},
      {2, "sigma-closed-forms", 0.0, criterion_closed_forms},
      {3, "product-measure-invariance", 120.0, criterion_invariance},
      {4, "coupling-contraction", 120.0, criterion_coupling},
      {5, "two-site-ctmc-oracle", 0.0, criterion_small_instance},
      {6, "pde-heat-mass-order", 0.0, criterion_pde},
      {7, "ensemble-equivalence", 300.0, criterion_ensembles},
      {8, "block-lln-scaling", 0.0, criterion_lln},
      {9, "hydrodynamic-convergence", 1800.0, criterion_convergence},
      {10, "profile-concentration", 0.0, criterion_concentration},
      {11, "report-determinism", 0.0, criterion_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = out.ok;
    std::string detail = out.detail;
    if (c.budget_seconds > 0.0) {
      detail += " budget=" + num(c.budget_seconds) + "s";
      if (secs > c.budget_seconds) {
        ok = false;
        detail += " EXCEEDED";
      }
    }
    std::printf("[%s] %02d %-26s %s time=%.1fs\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("%d/11 criteria passed\n", 11 - failures);
  return failures;
}
