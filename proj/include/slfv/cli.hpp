#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "slfv/model.hpp"
#include "slfv/montecarlo.hpp"

namespace slfv::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kConfigError = 2, kRuntimeError = 3 };

/// Config problem tied to a field path such as "model.u_s".
class ConfigFieldError : public std::runtime_error {
 public:
  ConfigFieldError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct OutputConfig {
  std::string directory = ".";
  std::string prefix = "slfv";
};

struct TheoryConfig {
  double theta = 1e-3;
  double theta1 = 1e-3;
  double theta2 = 1e-3;
  std::optional<double> c_ratio;  ///< defaults to rho / L^(2 alpha)
  double gamma_mid = 0.4;
  int beta_points = 181;
  double threshold = 0.01;
  bool full_terms = false;
};

struct KingmanConfig {
  PairingLayout layout = PairingLayout::square;
  double scale = 64.0;
};

struct RunConfig {
  ModelParams model;
  EstimatorConfig estimator;
  double horizon_multiplier = 50.0;  ///< horizon = multiplier * rho L^(2(1-alpha))
  OutputConfig output;
  TheoryConfig theory;
  KingmanConfig kingman;
  double decorr_snapshot = 0.0;      ///< rescaled time; 0 selects (log L)^5 (1 + log rho/(r rho))
  std::vector<double> ibd_thetas;
  nlohmann::json raw;
};

/// Schema-checked conversion. Unknown keys, missing required fields and
/// non-finite numbers raise ConfigFieldError.
RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a file; syntax errors carry the line and column.
RunConfig load_config(const std::string& path);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Floats in CSV output: 17 significant digits.
std::string format_double(double v);

struct OracleResult {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  ///< relative
  bool passed = false;
};

/// Built-in validation oracles with fixed seeds. `scale` multiplies sample
/// sizes and horizons (1 = the default quick suite).
std::vector<OracleResult> run_oracles(double scale = 1.0);

}  // namespace slfv::cli
