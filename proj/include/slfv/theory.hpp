#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace slfv::theory {

// Asymptotic survival laws. Phase 1 thresholds are rho L^(2(t - alpha)),
// t in [beta, 1]; phase 2 thresholds are t times the equilibrium scale.
// All functions throw DomainError outside their range of validity.

/// (beta - alpha) / (t - alpha).
double single_locus_survival_phase1(double t, double alpha, double beta);
/// (beta - alpha) / (1 - alpha) e^-t.
double single_locus_survival_phase2(double t, double alpha, double beta);
/// Independent loci: square of the single-locus law.
double joint_survival_fast_phase1(double t, double alpha, double beta);
double joint_survival_fast_phase2(double t, double alpha, double beta);
/// Slow recombination with crossover exponent gamma > beta. Identical to the
/// single-locus law up to t = gamma, then (beta-alpha)(gamma-alpha)/(t-alpha)^2.
double joint_survival_slow_phase1(double t, double alpha, double beta, double gamma);
/// Requires gamma in (beta, 1).
double joint_survival_slow_phase2(double t, double alpha, double beta, double gamma);

/// Parameters shared by the identity-by-descent integrals. Without large
/// events the same integrals apply with alpha = 0 and c_L = 1.
struct IbdModel {
  double side = 1e5;      ///< L
  double alpha = 0.1;
  double c_ratio = 0.01;  ///< c_L = rho / L^(2 alpha)
  bool large_events = true;

  double effective_alpha() const noexcept { return large_events ? alpha : 0.0; }
  double effective_c() const noexcept { return large_events ? c_ratio : 1.0; }
};

enum class IbdTerms { leading, full };

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;       ///< quadrature error estimate
  double tail_bound = 0.0;  ///< bound on the truncated part of an improper integral
};

/// int_lo^hi exp(-2 theta c L^(2u)) / (u - alpha)^2 du, evaluated in the log domain.
QuadratureResult decay_integral(double lo, double hi, double theta, double alpha, double c, double side);
/// int_{1/log L}^inf exp(-2 theta c L^2 log L u) e^-u du, truncated where the
/// integrand drops below 1e-30 of its maximum.
QuadratureResult equilibrium_tail_integral(double theta, double c, double side);

/// Probability of identity by descent at one locus for a sample at distance L^beta.
QuadratureResult ibd_single(double beta, double theta, const IbdModel& model, IbdTerms terms = IbdTerms::full);

/// Leading terms of the probability of identity by descent at both loci.
/// gamma is the correlation exponent (gamma_star without large events) and is
/// clamped to [beta, 1]: below beta there is no correlated phase, above 1 no
/// decorrelated one.
QuadratureResult ibd_double(double beta, double theta1, double theta2, double gamma, const IbdModel& model);

/// exp(-2 theta c L^(2 beta)), the decay factor that controls where the
/// leading IBD term vanishes.
double ibd_decay_factor(double beta, double theta, const IbdModel& model);

/// Smallest beta in [lo, hi] where the nonincreasing function drops to the
/// threshold, by bisection to within `tolerance`. Returns lo when it is
/// already below, nullopt when it never gets there.
std::optional<double> vanishing_point(const std::function<double(double)>& curve, double threshold, double lo,
                                      double hi, double tolerance = 1e-6);

struct IbdSingleRow {
  double beta;
  double value_large;
  double value_small;
};

struct IbdDoubleRow {
  double beta;
  double v_gamma_ge1;
  double v_gamma_mid;
  double v_gamma_le_alpha;
  double v_no_large;
};

std::vector<double> beta_grid(double lo, double hi, int points);

/// One-locus curves with and without large events.
std::vector<IbdSingleRow> ibd_single_curve(const std::vector<double>& betas, double theta, const IbdModel& model,
                                           IbdTerms terms = IbdTerms::leading);

/// Two-locus curves: gamma >= 1, gamma = gamma_mid, gamma <= alpha, and the
/// no-large-event curve at gamma_star.
std::vector<IbdDoubleRow> ibd_double_curve(const std::vector<double>& betas, double theta1, double theta2,
                                           double gamma_mid, double gamma_star, const IbdModel& model);

}  // namespace slfv::theory
