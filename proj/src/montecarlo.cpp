#include "slfv/montecarlo.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "slfv/error.hpp"

namespace slfv {
namespace {

double normal_quantile(double confidence) {
  const boost::math::normal standard;
  return boost::math::quantile(standard, 0.5 + 0.5 * confidence);
}

}  // namespace

double default_horizon(const DerivedScales& scales) { return 50.0 * scales.timescale(1.0); }

double effective_horizon(const EstimatorConfig& config, const DerivedScales& scales) {
  return config.horizon > 0.0 ? config.horizon : default_horizon(scales);
}

void check_config(const EstimatorConfig& config) {
  if (config.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (!std::is_sorted(config.t_grid.begin(), config.t_grid.end())) {
    throw ConfigError("t_grid must be sorted ascending");
  }
  if (!std::is_sorted(config.phase2_grid.begin(), config.phase2_grid.end())) {
    throw ConfigError("phase2_grid must be sorted ascending");
  }
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    throw ConfigError("confidence must lie in (0,1)");
  }
}

ProportionEstimate wilson_interval(std::size_t successes, std::size_t n, double confidence) {
  ProportionEstimate out;
  out.successes = successes;
  out.n = n;
  if (n == 0) {
    out.ci_hi = 1.0;
    return out;
  }
  const double z = normal_quantile(confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2n = z * z / nn;
  const double centre = (p + 0.5 * z2n) / (1.0 + z2n);
  const double half = z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
  out.estimate = p;
  out.ci_lo = std::max(0.0, centre - half);
  out.ci_hi = std::min(1.0, centre + half);
  return out;
}

SurvivalCurve survival_curve(std::string name, std::span<const StoppingTime> times, const DerivedScales& scales,
                             const EstimatorConfig& config) {
  auto point = [&](double label, double threshold) {
    std::size_t alive = 0;
    std::size_t known = 0;
    std::size_t censored = 0;
    for (const auto& t : times) {
      if (t.censored && threshold > t.value) {
        ++censored;
        continue;
      }
      ++known;
      if (t.censored || t.value > threshold) ++alive;
    }
    SurvivalPoint p{label, threshold, wilson_interval(alive, known, config.confidence)};
    p.survival.censored = censored;
    return p;
  };
  SurvivalCurve curve;
  curve.name = std::move(name);
  for (double t : config.t_grid) curve.points.push_back(point(t, scales.timescale(t)));
  for (double m : config.phase2_grid) curve.phase2_points.push_back(point(m, m * scales.equilibrium_scale));
  return curve;
}

Displacement sampling_separation(const ModelParams& params) {
  if (!params.beta) throw ConfigError("beta is required to place the sampled individuals");
  const double d = std::pow(params.side, *params.beta);
  if (!(d < 0.5 * params.side)) throw ConfigError("L^beta must be below L/2 for an axis-aligned sample");
  return {d, 0.0};
}

std::vector<PairRun> simulate_pairs(const ModelParams& params, Displacement separation,
                                    const EstimatorConfig& config) {
  check_config(config);
  const EventStream stream(params);
  const double horizon = effective_horizon(config, stream.scales());
  return run_replicates(config.replicates, config.seed, config.workers, [&](RandomStream& rng, std::size_t) {
    return run_single_locus_pair(stream, separation, horizon, rng);
  });
}

std::vector<RunRecord> simulate_two_locus(const ModelParams& params, Displacement separation,
                                          const EstimatorConfig& config) {
  check_config(config);
  const EventStream stream(params);
  const double horizon = effective_horizon(config, stream.scales());
  return run_replicates(config.replicates, config.seed, config.workers, [&](RandomStream& rng, std::size_t) {
    return run_two_locus(stream, separation, horizon, rng);
  });
}

std::vector<StoppingTime> coalescence_times(std::span<const PairRun> runs) {
  std::vector<StoppingTime> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.coalescence);
  return out;
}

std::vector<StoppingTime> locus_times(std::span<const RunRecord> records, int locus) {
  std::vector<StoppingTime> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(locus == 1 ? r.tau_Aa : r.tau_Bb);
  return out;
}

std::vector<StoppingTime> first_coalescence_times(std::span<const RunRecord> records) {
  std::vector<StoppingTime> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.first_coalescence());
  return out;
}

std::vector<SurvivalCurve> estimate_survival(SurvivalKind kind, const ModelParams& params,
                                             const EstimatorConfig& config) {
  const auto scales = derive_scales(params);
  const auto separation = sampling_separation(params);
  if (kind == SurvivalKind::single) {
    const auto runs = simulate_pairs(params, separation, config);
    return {survival_curve("single", coalescence_times(runs), scales, config)};
  }
  const auto records = simulate_two_locus(params, separation, config);
  if (kind == SurvivalKind::joint_min) {
    return {survival_curve("joint_min", first_coalescence_times(records), scales, config)};
  }
  return {survival_curve("locus_Aa", locus_times(records, 1), scales, config),
          survival_curve("locus_Bb", locus_times(records, 2), scales, config)};
}

ProportionEstimate equal_coalescence(std::span<const RunRecord> records, double confidence) {
  std::size_t equal = 0;
  std::size_t censored = 0;
  for (const auto& r : records) {
    if (r.equal_coalescence) ++equal;
    if (r.tau_Aa.censored || r.tau_Bb.censored) ++censored;
  }
  auto out = wilson_interval(equal, records.size(), confidence);
  out.censored = censored;
  return out;
}

ProportionEstimate estimate_equal_coalescence(const ModelParams& params, const EstimatorConfig& config) {
  const auto records = simulate_two_locus(params, sampling_separation(params), config);
  return equal_coalescence(records, config.confidence);
}

namespace {

IbdEstimate summarize_ibd(std::span<const double> values, std::size_t censored, double censored_weight,
                          double theta, double confidence) {
  IbdEstimate out;
  out.theta = theta;
  out.n = values.size();
  out.censored = censored;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  const double z = normal_quantile(confidence);
  out.estimate = mean;
  out.upper = mean + static_cast<double>(censored) * censored_weight / n;
  out.ci_lo = std::max(0.0, mean - z * se);
  out.ci_hi = std::min(1.0, out.upper + z * se);
  return out;
}

}  // namespace

IbdEstimate ibd_from_times(std::span<const StoppingTime> times, double theta, double confidence) {
  if (!(theta >= 0.0)) throw InvalidInput("mutation rate must be non-negative");
  std::vector<double> values;
  values.reserve(times.size());
  std::size_t censored = 0;
  double censored_weight = 0.0;
  for (const auto& t : times) {
    if (t.censored) {
      ++censored;
      censored_weight = std::exp(-2.0 * theta * t.value);
      values.push_back(0.0);
    } else {
      values.push_back(std::exp(-2.0 * theta * t.value));
    }
  }
  return summarize_ibd(values, censored, censored_weight, theta, confidence);
}

IbdEstimate joint_ibd(std::span<const RunRecord> records, double theta1, double theta2, double confidence) {
  std::vector<double> values;
  values.reserve(records.size());
  std::size_t censored = 0;
  double censored_weight = 0.0;
  for (const auto& r : records) {
    const double exponent = -2.0 * theta1 * r.tau_Aa.value - 2.0 * theta2 * r.tau_Bb.value;
    if (r.tau_Aa.censored || r.tau_Bb.censored) {
      ++censored;
      censored_weight = std::max(censored_weight, std::exp(exponent));
      values.push_back(0.0);
    } else {
      values.push_back(std::exp(exponent));
    }
  }
  return summarize_ibd(values, censored, censored_weight, theta1 + theta2, confidence);
}

std::vector<IbdEstimate> estimate_ibd(const ModelParams& params, const EstimatorConfig& config,
                                      std::span<const double> thetas) {
  const auto runs = simulate_pairs(params, sampling_separation(params), config);
  const auto times = coalescence_times(runs);
  std::vector<IbdEstimate> out;
  for (double theta : thetas) out.push_back(ibd_from_times(times, theta, config.confidence));
  return out;
}

std::size_t PairingDistribution::resolved() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::array<double, 6> PairingDistribution::frequencies() const noexcept {
  std::array<double, 6> f{};
  const auto total = resolved();
  if (total == 0) return f;
  for (int i = 0; i < 6; ++i) f[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return f;
}

std::array<TorusPoint, 4> square_marks(double square_side, double torus_side) {
  const double c = 0.5 * torus_side;
  const double h = 0.5 * square_side;
  return {wrap(c - h, c - h, torus_side), wrap(c + h, c - h, torus_side), wrap(c + h, c + h, torus_side),
          wrap(c - h, c + h, torus_side)};
}

std::array<TorusPoint, 4> far_random_marks(double d, double torus_side, RandomStream& rng) {
  std::array<TorusPoint, 4> marks;
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    for (auto& m : marks) m = {rng.uniform() * torus_side, rng.uniform() * torus_side};
    bool ok = true;
    for (const auto& [i, k] : kLineagePairs) {
      const double dist = distance(marks[i], marks[k], torus_side);
      if (dist < 0.5 * d || dist > 2.0 * d) ok = false;
    }
    if (ok) return marks;
  }
  throw ConfigError("cannot place four lineages at the requested pairwise distance");
}

ChiSquare chi_square_equal(std::span<const std::size_t> counts) {
  ChiSquare out;
  if (counts.size() < 2) return out;
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  if (total == 0.0) return out;
  const double expected = total / static_cast<double>(counts.size());
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    out.statistic += diff * diff / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

PairingDistribution estimate_pairing_distribution(const ModelParams& params, PairingLayout layout, double scale,
                                                  const EstimatorConfig& config) {
  check_config(config);
  const EventStream stream(params);
  const double horizon = effective_horizon(config, stream.scales());
  const auto square = square_marks(scale, params.side);
  const auto results =
      run_replicates(config.replicates, config.seed, config.workers, [&](RandomStream& rng, std::size_t) {
        const auto marks = layout == PairingLayout::square ? square : far_random_marks(scale, params.side, rng);
        return run_kingman_pairing(stream, marks, horizon, rng);
      });

  PairingDistribution dist;
  dist.replicates = results.size();
  for (const auto& r : results) {
    if (r.time.censored) ++dist.censored;
    else if (r.multiple) ++dist.multiple;
    else ++dist.counts[r.pair];
  }
  const auto uniform = chi_square_equal(dist.counts);
  dist.chi2_uniform = uniform.statistic;
  dist.p_uniform = uniform.p_value;
  std::array<std::size_t, 4> sides{};
  for (int i = 0; i < 4; ++i) sides[i] = dist.counts[kSquareSides[i]];
  std::array<std::size_t, 2> diagonals{dist.counts[kSquareDiagonals[0]], dist.counts[kSquareDiagonals[1]]};
  const auto side_test = chi_square_equal(sides);
  const auto diag_test = chi_square_equal(diagonals);
  dist.chi2_sides = side_test.statistic;
  dist.p_sides = side_test.p_value;
  dist.chi2_diagonals = diag_test.statistic;
  dist.p_diagonals = diag_test.p_value;
  return dist;
}

KolmogorovSmirnov ks_two_sample(std::vector<double> a, std::vector<double> b) {
  KolmogorovSmirnov out;
  if (a.empty() || b.empty()) return out;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t k = 0;
  double d = 0.0;
  while (i < a.size() && k < b.size()) {
    const double x = std::min(a[i], b[k]);
    while (i < a.size() && a[i] <= x) ++i;
    while (k < b.size() && b[k] <= x) ++k;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(k) / nb));
  }
  out.statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  if (lambda < 1e-3) return out;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  out.p_value = std::clamp(2.0 * sum, 0.0, 1.0);
  return out;
}

}  // namespace slfv
