#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "slfv/cli.hpp"

namespace slfv::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& section, const std::string& path, const std::set<std::string>& allowed) {
  if (!section.is_object()) throw ConfigFieldError(path, "expected an object");
  for (const auto& [key, value] : section.items()) {
    if (!allowed.contains(key)) throw ConfigFieldError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigFieldError(field, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ConfigFieldError(field, "must be finite");
  return v;
}

double required_number(const json& section, const std::string& path, const std::string& key) {
  if (!section.contains(key)) throw ConfigFieldError(join(path, key), "missing required field");
  return number(section.at(key), join(path, key));
}

double optional_number(const json& section, const std::string& path, const std::string& key, double fallback) {
  return section.contains(key) ? number(section.at(key), join(path, key)) : fallback;
}

std::uint64_t integer(const json& value, const std::string& field) {
  if (!value.is_number_integer() || (value.is_number_integer() && !value.is_number_unsigned() &&
                                     value.get<std::int64_t>() < 0)) {
    throw ConfigFieldError(field, "expected a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

std::vector<double> number_list(const json& value, const std::string& field) {
  if (!value.is_array()) throw ConfigFieldError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(number(value[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ParentCountLaw parent_law(const json& value, const std::string& field) {
  if (!value.is_object() || value.empty()) throw ConfigFieldError(field, "expected a map like {\"2\": 1.0}");
  std::vector<double> weights;
  for (const auto& [key, mass] : value.items()) {
    std::size_t used = 0;
    unsigned long j = 0;
    try {
      j = std::stoul(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || j < 1 || j > 1024) {
      throw ConfigFieldError(join(field, key), "parent count must be an integer in [1, 1024]");
    }
    if (weights.size() < j) weights.resize(j, 0.0);
    weights[j - 1] = number(mass, join(field, key));
  }
  return ParentCountLaw(std::move(weights));
}

ModelParams parse_model(const json& m) {
  const std::string p = "model";
  reject_unknown(m, p,
                 {"L", "alpha", "R_s", "R_B", "u_s", "u_B", "rho", "r", "lambda_s", "lambda_B", "beta",
                  "large_events", "rho_bound_C"});
  ModelParams params;
  params.side = required_number(m, p, "L");
  params.alpha = required_number(m, p, "alpha");
  params.small_radius = required_number(m, p, "R_s");
  params.large_radius_base = required_number(m, p, "R_B");
  params.small_impact = required_number(m, p, "u_s");
  params.large_impact = required_number(m, p, "u_B");
  params.rho = required_number(m, p, "rho");
  params.recombination = required_number(m, p, "r");
  for (const char* key : {"lambda_s", "lambda_B"}) {
    if (!m.contains(key)) throw ConfigFieldError(join(p, key), "missing required field");
  }
  params.small_parents = parent_law(m.at("lambda_s"), "model.lambda_s");
  params.large_parents = parent_law(m.at("lambda_B"), "model.lambda_B");
  if (m.contains("beta")) params.beta = number(m.at("beta"), "model.beta");
  if (m.contains("large_events")) {
    if (!m.at("large_events").is_boolean()) throw ConfigFieldError("model.large_events", "expected a boolean");
    params.large_events = m.at("large_events").get<bool>();
  }
  params.rho_upper_constant = optional_number(m, p, "rho_bound_C", 1.0);
  return params;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  reject_unknown(doc, "", {"model", "estimator", "output", "theory", "kingman", "decorr", "ibd"});
  RunConfig config;
  config.raw = doc;
  if (!doc.contains("model")) throw ConfigFieldError("model", "missing required section");
  config.model = parse_model(doc.at("model"));

  if (doc.contains("estimator")) {
    const auto& e = doc.at("estimator");
    const std::string p = "estimator";
    reject_unknown(e, p, {"replicates", "seed", "horizon_multiplier", "t_grid", "phase2_grid", "confidence"});
    auto& est = config.estimator;
    if (!e.contains("replicates")) throw ConfigFieldError("estimator.replicates", "missing required field");
    if (!e.contains("seed")) throw ConfigFieldError("estimator.seed", "missing required field");
    est.replicates = integer(e.at("replicates"), "estimator.replicates");
    if (est.replicates < 1) throw ConfigFieldError("estimator.replicates", "must be at least 1");
    est.seed = integer(e.at("seed"), "estimator.seed");
    config.horizon_multiplier = optional_number(e, p, "horizon_multiplier", 50.0);
    if (!(config.horizon_multiplier > 0.0)) throw ConfigFieldError("estimator.horizon_multiplier", "must be positive");
    if (e.contains("t_grid")) est.t_grid = number_list(e.at("t_grid"), "estimator.t_grid");
    if (e.contains("phase2_grid")) est.phase2_grid = number_list(e.at("phase2_grid"), "estimator.phase2_grid");
    if (!std::is_sorted(est.t_grid.begin(), est.t_grid.end())) {
      throw ConfigFieldError("estimator.t_grid", "must be sorted ascending");
    }
    if (!std::is_sorted(est.phase2_grid.begin(), est.phase2_grid.end())) {
      throw ConfigFieldError("estimator.phase2_grid", "must be sorted ascending");
    }
    est.confidence = optional_number(e, p, "confidence", 0.95);
    if (!(est.confidence > 0.0 && est.confidence < 1.0)) {
      throw ConfigFieldError("estimator.confidence", "must lie in (0,1)");
    }
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    reject_unknown(o, "output", {"directory", "prefix"});
    for (const char* key : {"directory", "prefix"}) {
      if (o.contains(key) && !o.at(key).is_string()) throw ConfigFieldError(join("output", key), "expected a string");
    }
    config.output.directory = o.value("directory", config.output.directory);
    config.output.prefix = o.value("prefix", config.output.prefix);
  }

  if (doc.contains("theory")) {
    const auto& t = doc.at("theory");
    const std::string p = "theory";
    reject_unknown(t, p, {"theta", "theta1", "theta2", "c_L", "gamma_mid", "beta_points", "threshold", "full_terms"});
    auto& th = config.theory;
    th.theta = optional_number(t, p, "theta", th.theta);
    th.theta1 = optional_number(t, p, "theta1", th.theta1);
    th.theta2 = optional_number(t, p, "theta2", th.theta2);
    if (t.contains("c_L")) th.c_ratio = number(t.at("c_L"), "theory.c_L");
    th.gamma_mid = optional_number(t, p, "gamma_mid", th.gamma_mid);
    if (t.contains("beta_points")) {
      th.beta_points = static_cast<int>(integer(t.at("beta_points"), "theory.beta_points"));
      if (th.beta_points < 2) throw ConfigFieldError("theory.beta_points", "must be at least 2");
    }
    th.threshold = optional_number(t, p, "threshold", th.threshold);
    if (t.contains("full_terms")) {
      if (!t.at("full_terms").is_boolean()) throw ConfigFieldError("theory.full_terms", "expected a boolean");
      th.full_terms = t.at("full_terms").get<bool>();
    }
  }

  if (doc.contains("kingman")) {
    const auto& k = doc.at("kingman");
    reject_unknown(k, "kingman", {"layout", "scale"});
    if (k.contains("layout")) {
      const auto& layout = k.at("layout");
      if (layout == "square") config.kingman.layout = PairingLayout::square;
      else if (layout == "far_random") config.kingman.layout = PairingLayout::far_random;
      else throw ConfigFieldError("kingman.layout", "expected \"square\" or \"far_random\"");
    }
    config.kingman.scale = optional_number(k, "kingman", "scale", config.kingman.scale);
    if (!(config.kingman.scale > 0.0)) throw ConfigFieldError("kingman.scale", "must be positive");
  }

  if (doc.contains("decorr")) {
    const auto& d = doc.at("decorr");
    reject_unknown(d, "decorr", {"snapshot"});
    config.decorr_snapshot = optional_number(d, "decorr", "snapshot", 0.0);
    if (config.decorr_snapshot < 0.0) throw ConfigFieldError("decorr.snapshot", "must be non-negative");
  }

  if (doc.contains("ibd")) {
    const auto& i = doc.at("ibd");
    reject_unknown(i, "ibd", {"thetas"});
    if (i.contains("thetas")) config.ibd_thetas = number_list(i.at("thetas"), "ibd.thetas");
    for (std::size_t k = 0; k < config.ibd_thetas.size(); ++k) {
      if (config.ibd_thetas[k] < 0.0) throw ConfigFieldError("ibd.thetas[" + std::to_string(k) + "]", "must be non-negative");
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigFieldError("--config", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigFieldError(path, e.what());
  }
  return parse_config(doc);
}

}  // namespace slfv::cli
