// Command line front end: wires configs and the model catalog into the
// experiment harness and reports pass/fail through the exit code.
//
// Exit codes: 0 success, 2 bad configuration, 3 numerical failure,
// 4 assertion requested and the experiment check failed.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hydrolim/catalog.hpp"
#include "hydrolim/errors.hpp"
#include "hydrolim/harness.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string catalog_path;
  std::string model;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  int threads = -1;
  bool seed_set = false;
  bool assert_pass = false;
  bool keep_snapshots = false;
};

using RunFn = hydrolim::RunArtifacts (*)(const hydrolim::ExperimentConfig&,
                                         const hydrolim::ModelCatalog&);

int run_mode(const char* mode, RunFn fn, const CliOverrides& ov) {
  try {
    hydrolim::ExperimentConfig cfg;
    if (!ov.config_path.empty()) cfg = hydrolim::ExperimentConfig::from_file(ov.config_path);
    if (ov.seed_set) cfg.seed = ov.seed;
    if (!ov.model.empty()) cfg.model = ov.model;
    if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
    if (!ov.format.empty()) cfg.format = ov.format;
    if (ov.threads >= 0) cfg.threads = ov.threads;
    if (ov.keep_snapshots) cfg.keep_snapshots = true;
    cfg.validate();

    const hydrolim::ModelCatalog catalog = ov.catalog_path.empty()
                                               ? hydrolim::ModelCatalog::builtin()
                                               : hydrolim::ModelCatalog::from_file(ov.catalog_path);

    const auto t0 = std::chrono::steady_clock::now();
    const hydrolim::RunArtifacts art = fn(cfg, catalog);
    hydrolim::write_artifacts(art, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::fprintf(stderr, "%s: wall time %.3f s\n", mode, secs);
    std::printf("%s: %s (artifacts in %s)\n", mode, art.passed ? "PASS" : "FAIL",
                cfg.out_dir.c_str());
    if (ov.assert_pass && !art.passed) return 4;
    return 0;
  } catch (const hydrolim::ConfigError& e) {
    std::fprintf(stderr, "%s: config error: %s\n", mode, e.what());
    return 2;
  } catch (const hydrolim::NumericError& e) {
    std::fprintf(stderr, "%s: numerical error: %s\n", mode, e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: error: %s\n", mode, e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle system to hydrodynamic limit toolkit"};
  app.require_subcommand(1);

  CliOverrides ov;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ov.config_path, "JSON experiment config (defaults used if absent)");
    sub->add_option("--catalog", ov.catalog_path, "JSON model catalog (builtin if absent)");
    sub->add_option("--model", ov.model, "model preset name override");
    sub->add_option("--seed", ov.seed, "base RNG seed override")
        ->check(CLI::NonNegativeNumber)
        ->each([&](const std::string&) { ov.seed_set = true; });
    sub->add_option("--out", ov.out_dir, "output directory override");
    sub->add_option("--threads", ov.threads, "worker threads (0 = hardware)");
    sub->add_option("--format", ov.format, "curves format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--assert", ov.assert_pass, "exit 4 when the experiment check fails");
    sub->add_flag("--keep-snapshots", ov.keep_snapshots, "write raw trajectory snapshots");
  };

  struct ModeEntry {
    const char* name;
    const char* help;
    RunFn fn;
  };
  const ModeEntry modes[] = {
      {"converge", "dictionary discrepancy against the limit PDE across N", hydrolim::run_convergence},
      {"concentrate", "exceedance frequencies of one observable across N", hydrolim::run_concentration},
      {"couple", "distance decay between coupled twin systems", hydrolim::run_coupling_test},
      {"invariance", "stationarity drift test started from product equilibrium", hydrolim::run_invariance_test},
      {"ensembles", "canonical versus grand-canonical flux error across windows", hydrolim::run_ensembles_study},
      {"lln", "block consistency statistic decay across window widths", hydrolim::run_lln_study},
      {"pde", "limit PDE solver diagnostics and grid refinement", hydrolim::run_pde_study},
      {"validate", "model hypothesis checks against declared flags", hydrolim::run_validate},
  };

  for (const auto& m : modes) add_common(app.add_subcommand(m.name, m.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (const auto& m : modes)
    if (app.got_subcommand(m.name)) return run_mode(m.name, m.fn, ov);
  return 2;
}
