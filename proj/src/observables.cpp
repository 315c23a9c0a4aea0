#include "slfv/observables.hpp"

#include <optional>

namespace slfv {

void InvariantAudit::fail(std::string message) {
  // Keep the first few messages; the count is what matters.
  if (violations_.size() < 64) violations_.push_back(std::move(message));
  else violations_.emplace_back();
}

void InvariantAudit::observe(const AncestryState& before, const StepResult& step, const AncestryState& after,
                             const EventStream& stream) {
  ++steps_;
  const double side = stream.params().side;
  const LabelSet tracked = before.tracked();
  if (auto err = check_invariants(after, tracked, side)) fail(*err);
  if (!(after.time > before.time)) fail("time did not advance");

  const double bound = 2.0 * step.event.radius * (1.0 + 1e-12);
  for (Label label : kLabelOrder) {
    if (!tracked.contains(label)) continue;
    const double jump = distance(before.blocks[before.block_of(label)].mark,
                                 after.blocks[after.block_of(label)].mark, side);
    if (jump > bound) fail("lineage jumped farther than twice the event radius");
  }
  const auto absorbing = [&](Label x, Label y) {
    if (tracked.contains(x) && tracked.contains(y) && before.together(x, y) && !after.together(x, y)) {
      fail("same-locus lineages separated after coalescing");
    }
  };
  absorbing(Label::A, Label::a);
  absorbing(Label::B, Label::b);
}

void InvariantAudit::check_order(StoppingTime gathering, StoppingTime coalescence) {
  if (!gathering.censored && !coalescence.censored && gathering.value > coalescence.value) {
    fail("gathering time exceeds coalescence time");
  }
  if (gathering.censored && !coalescence.censored) fail("coalesced without gathering");
}

namespace {

/// Steps the state until on_step returns true (returns true) or the next event
/// falls beyond the horizon (returns false, state untouched by that event).
template <class OnStep>
bool advance(AncestryState& state, const EventStream& stream, double horizon, RandomStream& rng,
             InvariantAudit* audit, OnStep&& on_step) {
  std::optional<AncestryState> before;
  for (;;) {
    const auto marks = state.marks();
    StepResult result{stream.next({marks.data(), marks.size()}, rng), {}};
    if (state.time + result.event.dt > horizon) return false;
    if (audit) before = state;
    result.outcome = apply_event(state, result.event, stream.params(), rng);
    if (audit) audit->observe(*before, result, state, stream);
    if (on_step(result, before)) return true;
  }
}

struct PairTracker {
  Label x;
  Label y;
  double gather_radius;
  double side;
  StoppingTime coalescence;
  StoppingTime gathering;
  std::uint64_t merge_event = 0;
  bool merged = false;
  bool gathered = false;

  void update(const AncestryState& state) {
    if (!gathered && state.separation(x, y, side) <= gather_radius) {
      gathered = true;
      gathering = StoppingTime::observed(state.time);
    }
    if (!merged && state.together(x, y)) {
      merged = true;
      coalescence = StoppingTime::observed(state.time);
      merge_event = state.events;
    }
  }
  void censor(double horizon) {
    if (!gathered) gathering = StoppingTime::censored_at(horizon);
    if (!merged) coalescence = StoppingTime::censored_at(horizon);
  }
};

}  // namespace

PairRun run_single_locus_pair(const EventStream& stream, Displacement separation, double horizon,
                              RandomStream& rng, InvariantAudit* audit) {
  const double side = stream.params().side;
  AncestryState state = init_single_locus_pair(separation, side);
  PairTracker pair{Label::A, Label::a, 2.0 * stream.scales().large_radius, side, {}, {}};
  pair.update(state);
  advance(state, stream, horizon, rng, audit, [&](const StepResult&, const auto&) {
    pair.update(state);
    return pair.merged;
  });
  pair.censor(horizon);
  if (audit) audit->check_order(pair.gathering, pair.coalescence);
  return {pair.coalescence, pair.gathering, state.events};
}

StoppingTime RunRecord::first_coalescence() const noexcept {
  if (tau_Aa.censored && tau_Bb.censored) return tau_Aa;
  if (tau_Aa.censored) return tau_Bb;
  if (tau_Bb.censored) return tau_Aa;
  return tau_Aa.value <= tau_Bb.value ? tau_Aa : tau_Bb;
}

RunRecord run_two_locus(const EventStream& stream, Displacement separation, double horizon,
                        RandomStream& rng, InvariantAudit* audit) {
  const double side = stream.params().side;
  const double gather = 2.0 * stream.scales().large_radius;
  AncestryState state = init_two_individuals(separation, side);
  PairTracker locus1{Label::A, Label::a, gather, side, {}, {}};
  PairTracker locus2{Label::B, Label::b, gather, side, {}, {}};
  locus1.update(state);
  locus2.update(state);
  advance(state, stream, horizon, rng, audit, [&](const StepResult&, const auto&) {
    locus1.update(state);
    locus2.update(state);
    return locus1.merged && locus2.merged;
  });
  locus1.censor(horizon);
  locus2.censor(horizon);

  RunRecord record;
  record.tau_Aa = locus1.coalescence;
  record.tau_Bb = locus2.coalescence;
  record.gather_Aa = locus1.gathering;
  record.gather_Bb = locus2.gathering;
  record.merge_event_Aa = locus1.merge_event;
  record.merge_event_Bb = locus2.merge_event;
  record.equal_coalescence = locus1.merged && locus2.merged && locus1.merge_event == locus2.merge_event;
  record.horizon = horizon;
  record.events = state.events;
  if (audit) {
    audit->check_order(record.gather_Aa, record.tau_Aa);
    audit->check_order(record.gather_Bb, record.tau_Bb);
  }
  return record;
}

StoppingTime run_effective_recombination(const EventStream& stream, double horizon, RandomStream& rng,
                                         InvariantAudit* audit) {
  AncestryState state = init_same_individual();
  const double rho = stream.params().rho;
  bool apart = false;  // A and B in distinct blocks just before the current event
  const bool hit = advance(state, stream, horizon, rng, audit, [&](const StepResult& step, const auto&) {
    const bool triggered = apart && step.event.kind == EventKind::large && step.outcome.affected > 0;
    apart = state.blocks.size() == 2;
    return triggered;
  });
  return hit ? StoppingTime::observed(state.time / rho) : StoppingTime::censored_at(horizon / rho);
}

StoppingTime run_separation_exit(const EventStream& stream, double horizon, RandomStream& rng,
                                 InvariantAudit* audit) {
  AncestryState state = init_same_individual();
  const double side = stream.params().side;
  const double rho = stream.params().rho;
  const double exit_radius = 3.0 * stream.scales().large_radius;
  const bool exited = advance(state, stream, horizon, rng, audit, [&](const StepResult&, const auto&) {
    return state.separation(Label::A, Label::B, side) > exit_radius;
  });
  return exited ? StoppingTime::observed(state.time / rho) : StoppingTime::censored_at(horizon / rho);
}

double run_decorrelation_snapshot(const EventStream& stream, double snapshot, RandomStream& rng,
                                  InvariantAudit* audit) {
  AncestryState state = init_same_individual();
  const double side = stream.params().side;
  advance(state, stream, snapshot * stream.params().rho, rng, audit,
          [](const StepResult&, const auto&) { return false; });
  return state.separation(Label::A, Label::B, side) / stream.scales().space_scale;
}

PairingResult run_kingman_pairing(const EventStream& stream, const std::array<TorusPoint, 4>& marks,
                                  double horizon, RandomStream& rng, InvariantAudit* audit) {
  AncestryState state = init_singletons(marks);
  const bool merged = advance(state, stream, horizon, rng, audit, [&](const StepResult& step, const auto&) {
    return step.outcome.merges > 0;
  });
  PairingResult result;
  if (!merged) {
    result.time = StoppingTime::censored_at(horizon);
    return result;
  }
  result.time = StoppingTime::observed(state.time);
  if (state.blocks.size() != 3) {
    result.multiple = true;
    return result;
  }
  for (const auto& block : state.blocks) {
    if (block.labels.size() != 2) continue;
    for (int p = 0; p < 6; ++p) {
      const auto [i, k] = kLineagePairs[p];
      if (block.labels == (LabelSet(kLabelOrder[i]) | kLabelOrder[k])) result.pair = p;
    }
  }
  return result;
}

}  // namespace slfv
