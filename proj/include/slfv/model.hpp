#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slfv/random.hpp"

namespace slfv {

/// Probability mass function on {1, 2, ...} with finite support.
/// weights()[k] is the mass of k + 1.
class ParentCountLaw {
 public:
  ParentCountLaw() : ParentCountLaw(point_mass(1)) {}
  explicit ParentCountLaw(std::vector<double> weights);

  static ParentCountLaw point_mass(unsigned j);

  const std::vector<double>& weights() const noexcept { return weights_; }
  unsigned max_count() const noexcept { return static_cast<unsigned>(weights_.size()); }
  double mass(unsigned j) const noexcept {
    return (j >= 1 && j <= weights_.size()) ? weights_[j - 1] : 0.0;
  }
  double total() const noexcept;

  /// Draws j with probability mass(j).
  unsigned sample(RandomStream& rng) const noexcept;

 private:
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  unsigned degenerate_ = 0;  // nonzero when the law is a point mass
};

/// All model constants of the two-radius spatial Lambda-Fleming-Viot process
/// with recombination. Lengths in the original (unrescaled) units.
struct ModelParams {
  double side = 256.0;              ///< L, torus side length
  double alpha = 0.5;               ///< large-event radius exponent, in (0, 1]
  double small_radius = 1.0;        ///< R_s
  double large_radius_base = 1.0;   ///< R_B; large events have radius R_B * L^alpha
  double small_impact = 0.3;        ///< u_s
  double large_impact = 0.3;        ///< u_B
  double rho = 64.0;                ///< rarity factor of large events
  double recombination = 0.1;       ///< r_L
  ParentCountLaw small_parents = ParentCountLaw::point_mass(2);  ///< lambda_s
  ParentCountLaw large_parents = ParentCountLaw::point_mass(2);  ///< lambda_B
  std::optional<double> beta;       ///< sampling separation exponent
  bool large_events = true;         ///< false switches the large-event stream off
  double rho_upper_constant = 1.0;  ///< C in rho <= C L^(2 alpha) (soft bound)
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

/// Checks the standing assumptions. Never throws; hard failures go to
/// violations and the soft window log L <= rho <= C L^(2 alpha) to warnings.
ValidationReport validate(const ModelParams& params);

/// sigma_L^2 from the small- and large-event second moments, using
/// int x_1^2 L_R(x, 0) dx = pi^2 R^6 / 2. The torus correction is ignored.
double sigma2(const ModelParams& params);

/// Second moment int_{R^2} x_1^2 L_R(x, 0) dx.
double lens_second_moment(double radius);

/// Finite-L analogue of gamma: alpha + log(1 + log(rho)/(r rho)) / (2 log L).
double gamma_finite(const ModelParams& params);

/// log(r^-1 log L) / (2 log L), the decorrelation exponent without large events.
double gamma_star(double side, double recombination);

/// L^alpha sqrt(1 + log(rho)/(r rho)).
double d_star(const ModelParams& params);

/// Quantities derived once from ModelParams.
struct DerivedScales {
  double large_radius = 0.0;           ///< R_B L^alpha
  double small_rate_per_block = 0.0;   ///< pi R_s^2
  double large_rate_per_block = 0.0;   ///< pi R_B^2 / rho (0 without large events)
  double large_intensity = 0.0;        ///< per-area rate 1/(rho L^(2 alpha))
  double sigma2 = 0.0;
  double gamma_finite = 0.0;
  double gamma_star = 0.0;
  double d_star = 0.0;
  double rho = 0.0;
  double alpha = 0.0;
  double log_side = 0.0;
  double space_scale = 0.0;            ///< L^alpha
  double equilibrium_scale = 0.0;      ///< (1-alpha)/(2 pi sigma^2) rho L^(2(1-alpha)) log L

  /// rho L^(2(t - alpha)).
  double timescale(double t) const noexcept;
};

DerivedScales derive_scales(const ModelParams& params);

}  // namespace slfv
