#pragma once

#include <map>
#include <string>
#include <vector>

#include "hydrolim/models.hpp"

namespace hydrolim {

struct ZrpModel {
  std::string name;
  JumpRate rate;
  // Whether the model declares itself inside the standing rate hypotheses.
  // zrp-constant is shipped as a deliberate out-of-hypothesis reference
  // model: its gap clause fails by design.
  bool hypotheses_declared_satisfied = true;
};

struct GlkModel {
  std::string name;
  Potential potential;
};

// Named model and kernel presets.  The builtin catalog and the shipped
// data/models.json file are generated from the same embedded JSON text, so
// the file format is exercised even when no file is supplied.
class ModelCatalog {
 public:
  static ModelCatalog builtin();
  static ModelCatalog from_json_text(const std::string& text);
  static ModelCatalog from_file(const std::string& path);
  static const char* builtin_json_text();

  const ZrpModel& zrp(const std::string& name) const;
  const GlkModel& glk(const std::string& name) const;
  const TransitionKernel& kernel(const std::string& name) const;

  bool has_zrp(const std::string& name) const { return zrp_.count(name) > 0; }
  bool has_glk(const std::string& name) const { return glk_.count(name) > 0; }
  bool has_kernel(const std::string& name) const { return kernels_.count(name) > 0; }

  std::vector<std::string> model_names() const;
  std::vector<std::string> kernel_names() const;

 private:
  std::map<std::string, ZrpModel> zrp_;
  std::map<std::string, GlkModel> glk_;
  std::map<std::string, TransitionKernel> kernels_;
};

}  // namespace hydrolim
