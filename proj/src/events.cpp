#include "slfv/events.hpp"

#include <string>

#include "slfv/error.hpp"

namespace slfv {

unsigned sample_num_parents(const ParentCountLaw& law, RandomStream& rng) { return law.sample(rng); }

EventStream::EventStream(const ModelParams& params) : params_(params), scales_(derive_scales(params)) {
  if (!(2.0 * params_.small_radius < params_.side)) {
    throw ConfigError("small event ball overlaps itself: 2 R_s >= L");
  }
  if (params_.large_events && !(2.0 * scales_.large_radius < params_.side)) {
    throw ConfigError("large event ball overlaps itself: 2 R_B L^alpha >= L");
  }
}

Event EventStream::next(std::span<const TorusPoint> marks, RandomStream& rng) const {
  if (marks.empty() || marks.size() > kMaxMarks) {
    throw InvalidInput("next_event needs between 1 and " + std::to_string(kMaxMarks) + " marks");
  }
  const auto n = static_cast<std::uint32_t>(marks.size());
  const double small_rate = n * scales_.small_rate_per_block;
  const double total_rate = small_rate + n * scales_.large_rate_per_block;
  const double side = params_.side;

  Event event;
  for (;;) {
    event.dt += rng.exponential(total_rate);
    event.kind = rng.uniform() * total_rate < small_rate ? EventKind::small : EventKind::large;
    const double r = radius(event.kind);
    const TorusPoint& origin = marks[rng.below(n)];
    event.center = sample_in_ball(origin, r, side, rng);

    unsigned covered = 0;
    for (const auto& mark : marks) {
      if (ball_covers(event.center, r, mark, side)) ++covered;
    }
    if (covered <= 1 || rng.uniform() * covered < 1.0) break;
  }

  const bool small = event.kind == EventKind::small;
  event.radius = radius(event.kind);
  event.impact = small ? params_.small_impact : params_.large_impact;
  event.num_parents = (small ? params_.small_parents : params_.large_parents).sample(rng);
  event.parent_positions.reserve(event.num_parents);
  for (unsigned k = 0; k < event.num_parents; ++k) {
    event.parent_positions.push_back(sample_in_ball(event.center, event.radius, side, rng));
  }
  return event;
}

Event next_event(std::span<const TorusPoint> marks, const ModelParams& params, RandomStream& rng) {
  return EventStream(params).next(marks, rng);
}

}  // namespace slfv
