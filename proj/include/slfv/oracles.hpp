#pragma once

#include <cstdint>

#include "slfv/geometry.hpp"
#include "slfv/model.hpp"

// Measurement harnesses shared by `slfv validate` and the test suites. Each
// one measures a quantity by brute force so it can be compared with the
// closed form it is paired with.
namespace slfv::oracles {

/// Area of the intersection of two radius-R discs at distance d, estimated
/// from uniform points in the bounding box of the intersection.
double lens_area_monte_carlo(double radius, double d, std::size_t points, std::uint64_t seed);

struct LineageMotion {
  double time = 0.0;
  std::uint64_t jumps = 0;
  double sum_squared = 0.0;  ///< sum over jumps of dx^2 + dy^2

  double jump_rate() const noexcept { return static_cast<double>(jumps) / time; }
  /// Per-coordinate variance of the displacement per unit time.
  double variance_rate() const noexcept { return sum_squared / (2.0 * time); }
};

/// Follows one single-locus lineage up to the horizon.
LineageMotion single_lineage_motion(const ModelParams& params, double horizon, std::uint64_t seed);

/// Closed-form per-coordinate variance rate of one lineage:
/// u_s pi R_s^4 / 2 + u_B pi (R_B L^alpha)^4 / (2 rho L^(2 alpha)).
double lineage_variance_rate(const ModelParams& params);

/// Accepted events per unit time for marks that never move.
double pinned_event_rate(const ModelParams& params, TorusPoint a, TorusPoint b, double horizon, std::uint64_t seed);

struct BallStatistics {
  double mean_distance = 0.0;
  double inner_fraction = 0.0;  ///< fraction within R/2 of the center
};

BallStatistics uniform_ball_statistics(double radius, double side, std::size_t draws, std::uint64_t seed);

}  // namespace slfv::oracles
