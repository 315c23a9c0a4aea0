#pragma once

#include <cstdint>
#include <span>

#include <boost/container/small_vector.hpp>

#include "slfv/geometry.hpp"
#include "slfv/model.hpp"
#include "slfv/random.hpp"

namespace slfv {

enum class EventKind : std::uint8_t { small, large };

/// One reproduction (small) or extinction/recolonization (large) event.
struct Event {
  double dt = 0.0;  ///< waiting time since the previous accepted event
  TorusPoint center;
  EventKind kind = EventKind::small;
  double radius = 0.0;
  double impact = 0.0;
  unsigned num_parents = 1;
  boost::container::small_vector<TorusPoint, 4> parent_positions;
};

unsigned sample_num_parents(const ParentCountLaw& law, RandomStream& rng);

/// Backward-in-time generator of the events that cover at least one of the
/// current lineage marks.
///
/// Candidates arrive at rate n * pi * radius^2 * intensity per kind (n marks).
/// Each candidate picks a mark uniformly, draws the center uniformly in that
/// mark's ball and is kept with probability 1/m, m being the number of marks
/// the candidate ball covers. Accepted events therefore form a Poisson stream
/// whose rate is the area of the union of the balls times the per-area
/// intensity. Rejected candidates only advance time.
class EventStream {
 public:
  /// Throws ConfigError when a ball would overlap itself on the torus.
  explicit EventStream(const ModelParams& params);

  /// marks must be nonempty and hold at most kMaxMarks points.
  Event next(std::span<const TorusPoint> marks, RandomStream& rng) const;

  const ModelParams& params() const noexcept { return params_; }
  const DerivedScales& scales() const noexcept { return scales_; }
  double radius(EventKind kind) const noexcept {
    return kind == EventKind::small ? params_.small_radius : scales_.large_radius;
  }

  static constexpr std::size_t kMaxMarks = 4;

 private:
  ModelParams params_;
  DerivedScales scales_;
};

/// Convenience wrapper building a stream for a single draw.
Event next_event(std::span<const TorusPoint> marks, const ModelParams& params, RandomStream& rng);

}  // namespace slfv
