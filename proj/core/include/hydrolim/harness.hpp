#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hydrolim {

class ModelCatalog;

// Experiment description shared by every CLI command.  Parsed from JSON;
// unknown keys are rejected so configs cannot silently misspell a field.
struct ExperimentConfig {
  std::string model = "zrp-linear";
  std::string kernel = "kernel-nn-symmetric";
  std::vector<int> n_values = {32, 64, 128, 256};
  int pde_grid = 256;
  double horizon = 0.1;          // macroscopic T
  int checkpoint_count = 11;     // equispaced on [0, T]
  int replicas = 200;
  int dictionary_k = 8;
  std::string block_rule = "fixed";  // "fixed" uses ell_values; "paper" adds round(N^{1/4})
  std::vector<int> ell_values = {2, 4, 8, 16, 32};
  double profile_mean = 1.0;
  double profile_amplitude = 0.5;
  int profile_mode = 1;
  double glk_dt = 0.1;             // microscopic Euler-Maruyama step
  double glk_diffusivity = 0.5;    // prefactor of Lap sigma(f) in the limit
  double epsilon = 0.1;            // concentration threshold
  std::string observable = "cos1";
  double canonical_mass = 1.0;
  int canonical_samples = 10000;
  int lln_n = 1024;
  int lln_samples = 4000;
  std::string coupling_init = "shifted-profile";
  std::string initial_data = "local-gibbs";  // or "deterministic" rounding
  std::uint64_t seed = 12345;
  int threads = 0;  // 0 = hardware concurrency
  std::string format = "csv";
  bool keep_snapshots = false;
  std::string out_dir = "out";

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  void validate() const;
};

struct CurveTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunArtifacts {
  std::string report_text;  // report.json content (sorted keys)
  CurveTable curves;
  bool passed = true;  // the command's own acceptance flag, used by --assert
};

RunArtifacts run_convergence(const ExperimentConfig& cfg, const ModelCatalog& catalog);
RunArtifacts run_concentration(const ExperimentConfig& cfg, const ModelCatalog& catalog);
RunArtifacts run_coupling_test(const ExperimentConfig& cfg, const ModelCatalog& catalog);
RunArtifacts run_invariance_test(const ExperimentConfig& cfg, const ModelCatalog& catalog);
RunArtifacts run_ensembles_study(const ExperimentConfig& cfg, const ModelCatalog& catalog);
RunArtifacts run_lln_study(const ExperimentConfig& cfg, const ModelCatalog& catalog);
RunArtifacts run_pde_study(const ExperimentConfig& cfg, const ModelCatalog& catalog);
RunArtifacts run_validate(const ExperimentConfig& cfg, const ModelCatalog& catalog);

// Writes report.json plus curves.csv (or curves.json under format "json")
// into cfg.out_dir, creating it if needed.  Snapshot files are written by
// the run functions themselves while replicas are in flight.
void write_artifacts(const RunArtifacts& artifacts, const ExperimentConfig& cfg);

}  // namespace hydrolim
