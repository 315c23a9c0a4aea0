#include "slfv/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "slfv/error.hpp"

namespace slfv {

ParentCountLaw::ParentCountLaw(std::vector<double> weights) : weights_(std::move(weights)) {
  while (!weights_.empty() && weights_.back() == 0.0) weights_.pop_back();
  cumulative_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (weights_[k] == 1.0) degenerate_ = static_cast<unsigned>(k + 1);
  }
}

ParentCountLaw ParentCountLaw::point_mass(unsigned j) {
  if (j == 0) throw InvalidInput("parent count must be at least 1");
  std::vector<double> w(j, 0.0);
  w[j - 1] = 1.0;
  return ParentCountLaw(std::move(w));
}

double ParentCountLaw::total() const noexcept {
  return cumulative_.empty() ? 0.0 : cumulative_.back();
}

unsigned ParentCountLaw::sample(RandomStream& rng) const noexcept {
  if (degenerate_ != 0) return degenerate_;
  const double u = rng.uniform() * total();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return max_count();
  return static_cast<unsigned>(it - cumulative_.begin()) + 1;
}

namespace {

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

void check_law(const ParentCountLaw& law, const char* name, std::vector<std::string>& out) {
  if (law.weights().empty()) {
    out.push_back(std::string(name) + " must have nonempty support");
    return;
  }
  for (double w : law.weights()) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      out.push_back(std::string(name) + " has a negative or non-finite mass");
      return;
    }
  }
  if (std::abs(law.total() - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << " masses sum to " << law.total() << ", expected 1";
    out.push_back(msg.str());
  }
}

}  // namespace

ValidationReport validate(const ModelParams& p) {
  ValidationReport report;
  auto& v = report.violations;
  if (!(p.side > 1.0) || !std::isfinite(p.side)) v.emplace_back("L must be finite and greater than 1");
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) v.emplace_back("alpha must lie in (0,1]");
  if (!(p.small_radius > 0.0) || !std::isfinite(p.small_radius)) v.emplace_back("R_s must be positive");
  if (!(p.large_radius_base > 0.0) || !std::isfinite(p.large_radius_base)) {
    v.emplace_back("R_B must be positive");
  }
  if (!in_open_unit(p.small_impact)) v.emplace_back("u_s must lie in (0,1)");
  if (!in_open_unit(p.large_impact)) v.emplace_back("u_B must lie in (0,1)");
  if (!(p.recombination > 0.0 && p.recombination <= 1.0)) v.emplace_back("r must lie in (0,1]");
  if (!(p.rho > 0.0) || !std::isfinite(p.rho)) v.emplace_back("rho must be positive and finite");
  check_law(p.small_parents, "lambda_s", v);
  check_law(p.large_parents, "lambda_B", v);
  if (!p.small_parents.weights().empty() && !(p.small_parents.mass(1) < 1.0)) {
    v.emplace_back("lambda_s({1})<1 required");
  }
  if (!v.empty()) return report;

  const double large_radius = p.large_radius_base * std::pow(p.side, p.alpha);
  if (!(2.0 * large_radius < 0.5 * p.side)) v.emplace_back("2 R_B L^alpha must be less than L/2");
  if (!(2.0 * p.small_radius < 0.5 * p.side)) v.emplace_back("2 R_s must be less than L/2");
  if (p.beta && !(*p.beta > p.alpha && *p.beta <= 1.0)) v.emplace_back("beta must lie in (alpha,1]");

  const double log_side = std::log(p.side);
  if (p.rho < log_side) report.warnings.emplace_back("rho is below log L");
  if (p.rho > p.rho_upper_constant * std::pow(p.side, 2.0 * p.alpha)) {
    report.warnings.emplace_back("rho exceeds C L^(2 alpha)");
  }
  return report;
}

double lens_second_moment(double radius) {
  const double r2 = radius * radius;
  return std::numbers::pi * std::numbers::pi * r2 * r2 * r2 / 2.0;
}

double sigma2(const ModelParams& p) {
  const double pi = std::numbers::pi;
  const double rs2 = p.small_radius * p.small_radius;
  const double rb2 = p.large_radius_base * p.large_radius_base;
  const double small = p.small_impact * p.rho / (pi * rs2 * std::pow(p.side, 2.0 * p.alpha)) *
                       lens_second_moment(p.small_radius);
  const double large = p.large_impact / (pi * rb2) * lens_second_moment(p.large_radius_base);
  return small + large;
}

double gamma_finite(const ModelParams& p) {
  const double ratio = std::log(p.rho) / (p.recombination * p.rho);
  return p.alpha + std::log1p(ratio) / (2.0 * std::log(p.side));
}

double gamma_star(double side, double recombination) {
  const double log_side = std::log(side);
  return std::log(log_side / recombination) / (2.0 * log_side);
}

double d_star(const ModelParams& p) {
  const double ratio = std::log(p.rho) / (p.recombination * p.rho);
  return std::pow(p.side, p.alpha) * std::sqrt(1.0 + ratio);
}

double DerivedScales::timescale(double t) const noexcept {
  return rho * std::exp(2.0 * (t - alpha) * log_side);
}

DerivedScales derive_scales(const ModelParams& p) {
  const double pi = std::numbers::pi;
  DerivedScales s;
  s.alpha = p.alpha;
  s.rho = p.rho;
  s.log_side = std::log(p.side);
  s.space_scale = std::pow(p.side, p.alpha);
  s.large_radius = p.large_radius_base * s.space_scale;
  s.small_rate_per_block = pi * p.small_radius * p.small_radius;
  if (p.large_events) {
    s.large_intensity = 1.0 / (p.rho * s.space_scale * s.space_scale);
    s.large_rate_per_block = pi * s.large_radius * s.large_radius * s.large_intensity;
  }
  s.sigma2 = sigma2(p);
  s.gamma_finite = gamma_finite(p);
  s.gamma_star = gamma_star(p.side, p.recombination);
  s.d_star = d_star(p);
  s.equilibrium_scale = (1.0 - p.alpha) / (2.0 * pi * s.sigma2) * p.rho *
                        std::exp(2.0 * (1.0 - p.alpha) * s.log_side) * s.log_side;
  return s;
}

}  // namespace slfv
