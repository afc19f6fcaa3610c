#include "hydrolim/catalog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hydrolim/errors.hpp"

namespace hydrolim {

namespace {

using nlohmann::json;

// Strict schema: any unknown key is a configuration error.
void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + context);
  }
}

JumpRate build_rate(const json& rate, const json& hzrp, const std::string& name) {
  check_keys(rate, {"form", "cap", "slope", "values"}, name + ".rate");
  check_keys(hzrp, {"lipschitz", "gap_n0", "gap_beta", "monotone", "satisfied"}, name + ".hzrp");

  JumpRateMetadata meta;
  meta.lipschitz = hzrp.value("lipschitz", 1.0);
  meta.gap_n0 = hzrp.value("gap_n0", std::int64_t{1});
  meta.gap_beta = hzrp.value("gap_beta", 1.0);
  meta.monotone = hzrp.value("monotone", true);

  const std::string form = rate.at("form").get<std::string>();
  const std::int64_t table_cap = 512;
  if (form == "linear") {
    return JumpRate([](std::int64_t k) { return static_cast<double>(k); }, table_cap, meta);
  }
  if (form == "indicator") {
    return JumpRate([](std::int64_t k) { return k >= 1 ? 1.0 : 0.0; }, table_cap, meta);
  }
  if (form == "capped-linear") {
    const double cap = rate.at("cap").get<double>();
    const double slope = rate.at("slope").get<double>();
    return JumpRate(
        [cap, slope](std::int64_t k) {
          return std::min(static_cast<double>(k), cap) + slope * static_cast<double>(k);
        },
        table_cap, meta);
  }
  if (form == "table") {
    const auto values = rate.at("values").get<std::vector<double>>();
    if (values.size() < 3) throw ConfigError("rate table for " + name + " needs >= 3 values");
    return JumpRate(
        [&values](std::int64_t k) {
          const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(k), values.size() - 1);
          return values[i];
        },
        static_cast<std::int64_t>(values.size()) - 1, meta);
  }
  throw ConfigError("unknown rate form '" + form + "' for " + name);
}

Potential build_potential(const json& pot, const std::string& name) {
  check_keys(pot, {"form", "kappa", "amplitude"}, name + ".potential");
  const std::string form = pot.at("form").get<std::string>();
  const double kappa = pot.value("kappa", 1.0);
  if (!(kappa > 0.0)) throw ConfigError("kappa must be > 0 for " + name);

  if (form == "quadratic") {
    Potential::Parts parts;
    parts.v = [kappa](double r) { return 0.5 * kappa * r * r; };
    parts.v_prime = [kappa](double r) { return kappa * r; };
    parts.v0 = parts.v;
    parts.convexity = kappa;
    return Potential(std::move(parts));
  }
  if (form == "quadratic-cosine") {
    const double amp = pot.at("amplitude").get<double>();
    Potential::Parts parts;
    parts.v = [kappa, amp](double r) { return 0.5 * kappa * r * r + amp * std::cos(r); };
    parts.v_prime = [kappa, amp](double r) { return kappa * r - amp * std::sin(r); };
    parts.v0 = [kappa](double r) { return 0.5 * kappa * r * r; };
    parts.v1 = [amp](double r) { return amp * std::cos(r); };
    parts.v1_prime = [amp](double r) { return -amp * std::sin(r); };
    parts.convexity = kappa;
    parts.v1_sup = std::abs(amp);
    parts.v1_lipschitz = std::abs(amp);
    return Potential(std::move(parts));
  }
  throw ConfigError("unknown potential form '" + form + "' for " + name);
}

}  // namespace

const char* ModelCatalog::builtin_json_text() {
  return R"json({
  "models": {
    "zrp-linear": {
      "kind": "zrp",
      "rate": { "form": "linear" },
      "hzrp": { "lipschitz": 1.0, "gap_n0": 1, "gap_beta": 1.0, "monotone": true, "satisfied": true }
    },
    "zrp-constant": {
      "kind": "zrp",
      "rate": { "form": "indicator" },
      "hzrp": { "lipschitz": 1.0, "gap_n0": 1, "gap_beta": 0.5, "monotone": true, "satisfied": false }
    },
    "zrp-capped": {
      "kind": "zrp",
      "rate": { "form": "capped-linear", "cap": 5.0, "slope": 0.1 },
      "hzrp": { "lipschitz": 1.1, "gap_n0": 1, "gap_beta": 0.1, "monotone": true, "satisfied": true }
    },
    "glk-gaussian": {
      "kind": "glk",
      "potential": { "form": "quadratic", "kappa": 1.0 }
    },
    "glk-perturbed": {
      "kind": "glk",
      "potential": { "form": "quadratic-cosine", "kappa": 1.0, "amplitude": 0.5 }
    }
  },
  "kernels": {
    "kernel-nn-symmetric": {
      "offsets": [
        { "displacement": 1, "probability": 0.5 },
        { "displacement": -1, "probability": 0.5 }
      ]
    }
  }
})json";
}

ModelCatalog ModelCatalog::builtin() { return from_json_text(builtin_json_text()); }

ModelCatalog ModelCatalog::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model catalog file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

ModelCatalog ModelCatalog::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model catalog JSON parse error: ") + e.what());
  }
  check_keys(doc, {"models", "kernels"}, "catalog");

  ModelCatalog catalog;
  for (auto it = doc.at("models").begin(); it != doc.at("models").end(); ++it) {
    const std::string& name = it.key();
    const json& spec = it.value();
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "zrp") {
      check_keys(spec, {"kind", "rate", "hzrp"}, name);
      const json hzrp = spec.value("hzrp", json::object());
      ZrpModel model{name, build_rate(spec.at("rate"), hzrp, name),
                     hzrp.value("satisfied", true)};
      catalog.zrp_.emplace(name, std::move(model));
    } else if (kind == "glk") {
      check_keys(spec, {"kind", "potential"}, name);
      GlkModel model{name, build_potential(spec.at("potential"), name)};
      catalog.glk_.emplace(name, std::move(model));
    } else {
      throw ConfigError("unknown model kind '" + kind + "' for " + name);
    }
  }
  if (doc.contains("kernels")) {
    for (auto it = doc.at("kernels").begin(); it != doc.at("kernels").end(); ++it) {
      const std::string& name = it.key();
      check_keys(it.value(), {"offsets"}, name);
      std::vector<KernelEntry> entries;
      for (const json& off : it.value().at("offsets")) {
        check_keys(off, {"displacement", "probability"}, name + ".offsets");
        entries.push_back({off.at("displacement").get<int>(), off.at("probability").get<double>()});
      }
      catalog.kernels_.emplace(name, TransitionKernel(std::move(entries)));
    }
  }
  return catalog;
}

const ZrpModel& ModelCatalog::zrp(const std::string& name) const {
  auto it = zrp_.find(name);
  if (it == zrp_.end()) throw ConfigError("unknown zero-range model preset: " + name);
  return it->second;
}

const GlkModel& ModelCatalog::glk(const std::string& name) const {
  auto it = glk_.find(name);
  if (it == glk_.end()) throw ConfigError("unknown Ginzburg-Landau model preset: " + name);
  return it->second;
}

const TransitionKernel& ModelCatalog::kernel(const std::string& name) const {
  auto it = kernels_.find(name);
  if (it == kernels_.end()) throw ConfigError("unknown kernel preset: " + name);
  return it->second;
}

std::vector<std::string> ModelCatalog::model_names() const {
  std::vector<std::string> names;
  for (const auto& [name, model] : zrp_) names.push_back(name);
  for (const auto& [name, model] : glk_) names.push_back(name);
  return names;
}

std::vector<std::string> ModelCatalog::kernel_names() const {
  std::vector<std::string> names;
  for (const auto& [name, kernel] : kernels_) names.push_back(name);
  return names;
}

}  // namespace hydrolim
