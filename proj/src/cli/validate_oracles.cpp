#include <cmath>
#include <numbers>

#include "slfv/ancestry.hpp"
#include "slfv/cli.hpp"
#include "slfv/events.hpp"
#include "slfv/oracles.hpp"

namespace slfv::oracles {

double lens_area_monte_carlo(double radius, double d, std::size_t points, std::uint64_t seed) {
  if (d >= 2.0 * radius) return 0.0;
  const double half_height = std::sqrt(radius * radius - 0.25 * d * d);
  const double x_lo = d - radius;
  const double width = 2.0 * radius - d;
  const double box = width * 2.0 * half_height;
  RandomStream rng(seed, 0);
  std::size_t hits = 0;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = x_lo + width * rng.uniform();
    const double y = half_height * (2.0 * rng.uniform() - 1.0);
    if (x * x + y * y <= r2 && (x - d) * (x - d) + y * y <= r2) ++hits;
  }
  return box * static_cast<double>(hits) / static_cast<double>(points);
}

LineageMotion single_lineage_motion(const ModelParams& params, double horizon, std::uint64_t seed) {
  const EventStream stream(params);
  RandomStream rng(seed, 0);
  AncestryState state;
  state.blocks.push_back({Label::A, {0.0, 0.0}});
  LineageMotion motion;
  for (;;) {
    const auto marks = state.marks();
    const Event event = stream.next({marks.data(), marks.size()}, rng);
    if (state.time + event.dt > horizon) break;
    const TorusPoint before = state.blocks.front().mark;
    const auto outcome = apply_event(state, event, params, rng);
    if (outcome.affected > 0) {
      ++motion.jumps;
      motion.sum_squared += displacement(state.blocks.front().mark, before, params.side).norm2();
    }
  }
  motion.time = horizon;
  return motion;
}

double lineage_variance_rate(const ModelParams& params) {
  const double pi = std::numbers::pi;
  const double small = params.small_impact * pi * std::pow(params.small_radius, 4) / 2.0;
  if (!params.large_events) return small;
  const double large_radius = params.large_radius_base * std::pow(params.side, params.alpha);
  return small + params.large_impact * pi * std::pow(large_radius, 4) /
                     (2.0 * params.rho * std::pow(params.side, 2.0 * params.alpha));
}

double pinned_event_rate(const ModelParams& params, TorusPoint a, TorusPoint b, double horizon, std::uint64_t seed) {
  const EventStream stream(params);
  RandomStream rng(seed, 0);
  const TorusPoint marks[2] = {a, b};
  double time = 0.0;
  std::uint64_t accepted = 0;
  for (;;) {
    const Event event = stream.next(marks, rng);
    if (time + event.dt > horizon) break;
    time += event.dt;
    ++accepted;
  }
  return static_cast<double>(accepted) / horizon;
}

BallStatistics uniform_ball_statistics(double radius, double side, std::size_t draws, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  const TorusPoint center{0.25 * side, 0.5 * side};
  double total = 0.0;
  std::size_t inner = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double dist = distance(sample_uniform_ball(center, radius, side, rng), center, side);
    total += dist;
    if (dist <= 0.5 * radius) ++inner;
  }
  return {total / static_cast<double>(draws), static_cast<double>(inner) / static_cast<double>(draws)};
}

}  // namespace slfv::oracles

namespace slfv::cli {

namespace {

OracleResult compare(std::string name, double measured, double expected, double tolerance) {
  return {std::move(name), measured, expected, tolerance, std::abs(measured - expected) <= tolerance * std::abs(expected)};
}

ModelParams small_only() {
  ModelParams p;
  p.side = 256.0;
  p.small_radius = 1.0;
  p.small_impact = 0.3;
  p.large_events = false;
  return p;
}

}  // namespace

std::vector<OracleResult> run_oracles(double scale) {
  using namespace oracles;
  std::vector<OracleResult> out;
  const auto points = static_cast<std::size_t>(1e6 * scale);
  for (double d : {0.0, 1.0, 1.5}) {
    out.push_back(compare("lens_area_mc(R=1,d=" + format_double(d) + ")", lens_area_monte_carlo(1.0, d, points, 11),
                          lens_area(1.0, d), 0.01));
  }

  const auto params = small_only();
  const auto motion = single_lineage_motion(params, 2e4 * scale, 12);
  const double pi = std::numbers::pi;
  out.push_back(compare("jump_rate(u_s pi R_s^2)", motion.jump_rate(), params.small_impact * pi, 0.02));
  out.push_back(compare("variance_rate(u_s pi R_s^4/2)", motion.variance_rate(), lineage_variance_rate(params), 0.03));

  ModelParams with_large = params;
  with_large.large_events = true;
  with_large.alpha = 0.5;
  with_large.rho = 64.0;
  with_large.large_radius_base = 1.0;
  with_large.large_impact = 0.3;
  const auto mixed = single_lineage_motion(with_large, 1e6 * scale, 13);
  out.push_back(compare("variance_rate(small+large)", mixed.variance_rate(), lineage_variance_rate(with_large), 0.03));

  const auto ball = uniform_ball_statistics(2.0, 256.0, static_cast<std::size_t>(1e5 * scale), 14);
  out.push_back(compare("ball_mean_distance(2R/3)", ball.mean_distance, 4.0 / 3.0, 0.01));
  out.push_back(compare("ball_inner_fraction(1/4)", ball.inner_fraction, 0.25, 0.02));

  const double union_rate = pinned_event_rate(params, {10.0, 10.0}, {11.0, 10.0}, 2e4 * scale, 15);
  out.push_back(compare("union_rate(2 pi - lens)", union_rate, 2.0 * pi - lens_area(1.0, 1.0), 0.02));
  return out;
}

}  // namespace slfv::cli
