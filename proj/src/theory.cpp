#include "slfv/theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "slfv/error.hpp"

namespace slfv::theory {
namespace {

constexpr double kRelativeTolerance = 1e-8;

void require_phase1(double t, double alpha, double beta) {
  if (!(alpha < beta && beta <= 1.0)) throw DomainError("need alpha < beta <= 1");
  if (!(t >= beta && t <= 1.0)) throw DomainError("t must lie in [beta, 1]");
}

void require_phase2(double t, double alpha, double beta) {
  if (!(alpha < 1.0)) throw DomainError("the equilibrium phase needs alpha < 1");
  if (!(alpha < beta && beta <= 1.0)) throw DomainError("need alpha < beta <= 1");
  if (!(t > 0.0)) throw DomainError("t must be positive");
}

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi) {
  QuadratureResult out;
  if (!(hi > lo)) return out;
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 25, kRelativeTolerance,
                                                                            &out.error, &l1);
  if (!std::isfinite(out.value) || out.error > 10.0 * kRelativeTolerance * std::max(l1, 1e-300)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "quadrature on [" << lo << ", " << hi << "] did not converge: value " << out.value << ", error "
        << out.error << ", L1 " << l1;
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace

double single_locus_survival_phase1(double t, double alpha, double beta) {
  require_phase1(t, alpha, beta);
  return (beta - alpha) / (t - alpha);
}

double single_locus_survival_phase2(double t, double alpha, double beta) {
  require_phase2(t, alpha, beta);
  return (beta - alpha) / (1.0 - alpha) * std::exp(-t);
}

double joint_survival_fast_phase1(double t, double alpha, double beta) {
  const double p = single_locus_survival_phase1(t, alpha, beta);
  return p * p;
}

double joint_survival_fast_phase2(double t, double alpha, double beta) {
  require_phase2(t, alpha, beta);
  const double q = (beta - alpha) / (1.0 - alpha);
  return q * q * std::exp(-2.0 * t);
}

double joint_survival_slow_phase1(double t, double alpha, double beta, double gamma) {
  require_phase1(t, alpha, beta);
  if (!(gamma > beta)) throw DomainError("slow recombination needs gamma > beta");
  if (t <= gamma) return (beta - alpha) / (t - alpha);
  const double g = gamma - alpha;
  const double s = t - alpha;
  return (beta - alpha) * g * g / (g * s * s);
}

double joint_survival_slow_phase2(double t, double alpha, double beta, double gamma) {
  require_phase2(t, alpha, beta);
  if (!(gamma > beta && gamma < 1.0)) throw DomainError("need beta < gamma < 1");
  const double g = gamma - alpha;
  const double e = 1.0 - alpha;
  return (beta - alpha) * g * g / (g * e * e) * std::exp(-2.0 * t);
}

QuadratureResult decay_integral(double lo, double hi, double theta, double alpha, double c, double side) {
  if (!(lo > alpha)) throw DomainError("integration range must start above alpha");
  const double log_side = std::log(side);
  const double log_scale = std::log(2.0 * theta * c);  // -inf for theta = 0
  auto f = [=](double u) {
    const double decay = theta > 0.0 ? std::exp(log_scale + 2.0 * u * log_side) : 0.0;
    return std::exp(-decay - 2.0 * std::log(u - alpha));
  };
  return integrate(f, lo, hi);
}

QuadratureResult equilibrium_tail_integral(double theta, double c, double side) {
  const double log_side = std::log(side);
  const double rate = 2.0 * theta * c * side * side * log_side + 1.0;
  const double lo = 1.0 / log_side;
  // Integrand exp(-rate u) is decreasing; stop where it is 1e-30 of its value at lo.
  const double hi = lo + std::log(1e30) / rate;
  auto f = [=](double u) { return std::exp(-rate * u); };
  QuadratureResult out = integrate(f, lo, hi);
  out.tail_bound = std::exp(-rate * hi) / rate;
  return out;
}

QuadratureResult ibd_single(double beta, double theta, const IbdModel& model, IbdTerms terms) {
  if (!(theta >= 0.0)) throw DomainError("theta must be non-negative");
  const double alpha = model.effective_alpha();
  const double c = model.effective_c();
  if (!(beta > alpha && beta <= 1.0)) throw DomainError("need alpha < beta <= 1");
  const auto head = decay_integral(beta, 1.0, theta, alpha, c, model.side);
  QuadratureResult out{(beta - alpha) * head.value, (beta - alpha) * head.error, 0.0};
  if (terms == IbdTerms::full) {
    const auto tail = equilibrium_tail_integral(theta, c, model.side);
    const double weight = (beta - alpha) / (1.0 - alpha);
    out.value += weight * tail.value;
    out.error += weight * tail.error;
    out.tail_bound = weight * tail.tail_bound;
  }
  return out;
}

QuadratureResult ibd_double(double beta, double theta1, double theta2, double gamma, const IbdModel& model) {
  if (!(theta1 >= 0.0 && theta2 >= 0.0)) throw DomainError("mutation rates must be non-negative");
  const double alpha = model.effective_alpha();
  const double c = model.effective_c();
  if (!(beta > alpha && beta <= 1.0)) throw DomainError("need alpha < beta <= 1");
  const double split = std::clamp(gamma, beta, 1.0);
  const double w = beta - alpha;
  QuadratureResult out;
  if (split > beta) {
    const auto joint = decay_integral(beta, split, theta1 + theta2, alpha, c, model.side);
    out.value += w * joint.value;
    out.error += w * joint.error;
  }
  if (split < 1.0) {
    const auto first = decay_integral(split, 1.0, theta1, alpha, c, model.side);
    const auto second = decay_integral(split, 1.0, theta2, alpha, c, model.side);
    out.value += w * w * first.value * second.value;
    out.error += w * w * (first.error * second.value + second.error * first.value);
  }
  return out;
}

double ibd_decay_factor(double beta, double theta, const IbdModel& model) {
  return std::exp(-2.0 * theta * model.effective_c() * std::exp(2.0 * beta * std::log(model.side)));
}

std::optional<double> vanishing_point(const std::function<double(double)>& curve, double threshold, double lo,
                                      double hi, double tolerance) {
  if (curve(lo) <= threshold) return lo;
  if (curve(hi) > threshold) return std::nullopt;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (curve(mid) > threshold) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> beta_grid(double lo, double hi, int points) {
  std::vector<double> grid;
  if (points < 2) return {lo};
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid.push_back(lo + (hi - lo) * i / (points - 1));
  return grid;
}

std::vector<IbdSingleRow> ibd_single_curve(const std::vector<double>& betas, double theta, const IbdModel& model,
                                           IbdTerms terms) {
  IbdModel with = model;
  with.large_events = true;
  IbdModel without = model;
  without.large_events = false;
  std::vector<IbdSingleRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    rows.push_back({beta, ibd_single(beta, theta, with, terms).value, ibd_single(beta, theta, without, terms).value});
  }
  return rows;
}

std::vector<IbdDoubleRow> ibd_double_curve(const std::vector<double>& betas, double theta1, double theta2,
                                           double gamma_mid, double gamma_star, const IbdModel& model) {
  IbdModel with = model;
  with.large_events = true;
  IbdModel without = model;
  without.large_events = false;
  std::vector<IbdDoubleRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    rows.push_back({beta, ibd_double(beta, theta1, theta2, 1.0, with).value,
                    ibd_double(beta, theta1, theta2, gamma_mid, with).value,
                    ibd_double(beta, theta1, theta2, model.alpha, with).value,
                    ibd_double(beta, theta1, theta2, gamma_star, without).value});
  }
  return rows;
}

}  // namespace slfv::theory
