#include "slfv/geometry.hpp"

#include <numbers>
#include <string>

#include "slfv/error.hpp"

namespace slfv {
namespace {

double wrap_coordinate(double v, double side) noexcept {
  double r = std::fmod(v, side);
  if (r < 0.0) r += side;
  // fmod of a tiny negative number plus L can round up to L itself.
  if (r >= side) r = 0.0;
  return r;
}

double minimal_image(double d, double side) noexcept {
  const double half = 0.5 * side;
  if (d >= half) {
    d -= side;
  } else if (d < -half) {
    d += side;
  }
  return d;
}

}  // namespace

TorusPoint wrap(double x, double y, double side) {
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw InvalidInput("torus side must be positive and finite");
  }
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw InvalidInput("non-finite coordinate");
  }
  return {wrap_coordinate(x, side), wrap_coordinate(y, side)};
}

Displacement displacement(TorusPoint a, TorusPoint b, double side) noexcept {
  return {minimal_image(a.x - b.x, side), minimal_image(a.y - b.y, side)};
}

TorusPoint translate(TorusPoint a, Displacement d, double side) noexcept {
  return {wrap_coordinate(a.x + d.dx, side), wrap_coordinate(a.y + d.dy, side)};
}

double lens_area(double radius, double d) {
  if (!(radius > 0.0)) throw InvalidInput("lens_area: radius must be positive");
  if (!(d >= 0.0)) throw InvalidInput("lens_area: distance must be non-negative");
  if (d >= 2.0 * radius) return 0.0;
  const double r2 = radius * radius;
  return 2.0 * r2 * std::acos(d / (2.0 * radius)) - 0.5 * d * std::sqrt(4.0 * r2 - d * d);
}

TorusPoint sample_in_ball(TorusPoint center, double radius, double side, RandomStream& rng) noexcept {
  double u = 0.0;
  double v = 0.0;
  do {
    u = 2.0 * rng.uniform() - 1.0;
    v = 2.0 * rng.uniform() - 1.0;
  } while (u * u + v * v > 1.0);
  return translate(center, {u * radius, v * radius}, side);
}

TorusPoint sample_uniform_ball(TorusPoint center, double radius, double side, RandomStream& rng) {
  if (!(radius > 0.0)) throw InvalidInput("sample_uniform_ball: radius must be positive");
  if (2.0 * radius >= side) {
    throw ConfigError("ball of radius " + std::to_string(radius) +
                      " overlaps itself on a torus of side " + std::to_string(side));
  }
  return sample_in_ball(center, radius, side, rng);
}

}  // namespace slfv
