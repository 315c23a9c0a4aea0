#pragma once

#include <cmath>

#include "slfv/random.hpp"

namespace slfv {

/// A location on the torus T(L). Coordinates are kept canonical, in [0, L).
/// The side length is supplied by the caller.
struct TorusPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

/// Minimal-image vector between two torus points, components in [-L/2, L/2).
struct Displacement {
  double dx = 0.0;
  double dy = 0.0;

  double norm() const noexcept { return std::hypot(dx, dy); }
  double norm2() const noexcept { return dx * dx + dy * dy; }

  friend bool operator==(const Displacement&, const Displacement&) = default;
};

/// Reduces a raw coordinate pair to its canonical representative on T(L).
/// Throws InvalidInput for non-finite coordinates or L <= 0.
TorusPoint wrap(double x, double y, double side);

/// Minimal-image displacement d with b + d == a (mod L).
Displacement displacement(TorusPoint a, TorusPoint b, double side) noexcept;

/// Torus (minimal-image) Euclidean distance.
inline double distance(TorusPoint a, TorusPoint b, double side) noexcept {
  return displacement(a, b, side).norm();
}

/// a + d, wrapped.
TorusPoint translate(TorusPoint a, Displacement d, double side) noexcept;

/// Area of B(0,R) ∩ B((d,0),R) for two equal discs whose centers are d apart.
double lens_area(double radius, double d);

/// Point uniform on the closed ball of the given radius around center.
/// Throws ConfigError when 2R >= L (the ball would wrap onto itself).
TorusPoint sample_uniform_ball(TorusPoint center, double radius, double side, RandomStream& rng);

/// Unchecked variant used in the event loop; radius validity is established once
/// when the model is built.
TorusPoint sample_in_ball(TorusPoint center, double radius, double side, RandomStream& rng) noexcept;

/// Closed-ball membership: torus distance(center, p) <= R.
inline bool ball_covers(TorusPoint center, double radius, TorusPoint p, double side) noexcept {
  return displacement(p, center, side).norm2() <= radius * radius;
}

}  // namespace slfv
