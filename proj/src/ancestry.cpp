#include "slfv/ancestry.hpp"

#include <bit>
#include <cstdio>
#include <ostream>

#include <boost/container/small_vector.hpp>

#include "slfv/error.hpp"

namespace slfv {

int LabelSet::size() const noexcept { return std::popcount(static_cast<unsigned>(bits_)); }

std::string LabelSet::to_string() const {
  std::string out;
  for (Label l : kLabelOrder) {
    if (contains(l)) {
      switch (l) {
        case Label::A: out += 'A'; break;
        case Label::a: out += 'a'; break;
        case Label::B: out += 'B'; break;
        case Label::b: out += 'b'; break;
      }
    }
  }
  return out;
}

boost::container::static_vector<TorusPoint, 4> AncestryState::marks() const {
  boost::container::static_vector<TorusPoint, 4> out;
  for (const auto& block : blocks) out.push_back(block.mark);
  return out;
}

LabelSet AncestryState::tracked() const noexcept {
  LabelSet all;
  for (const auto& block : blocks) all |= block.labels;
  return all;
}

std::size_t AncestryState::block_of(Label label) const noexcept {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].labels.contains(label)) return i;
  }
  return blocks.size();
}

double AncestryState::separation(Label x, Label y, double side) const noexcept {
  return distance(blocks[block_of(x)].mark, blocks[block_of(y)].mark, side);
}

AncestryState init_two_individuals(Displacement separation, double side) {
  if (separation.norm2() == 0.0) throw InvalidInput("sampled individuals must be at distinct locations");
  AncestryState state;
  state.blocks.push_back({LabelSet(Label::A) | Label::B, {0.0, 0.0}});
  state.blocks.push_back({LabelSet(Label::a) | Label::b, wrap(separation.dx, separation.dy, side)});
  return state;
}

AncestryState init_single_locus_pair(Displacement separation, double side) {
  if (separation.norm2() == 0.0) throw InvalidInput("sampled lineages must be at distinct locations");
  AncestryState state;
  state.blocks.push_back({Label::A, {0.0, 0.0}});
  state.blocks.push_back({Label::a, wrap(separation.dx, separation.dy, side)});
  return state;
}

AncestryState init_same_individual() {
  AncestryState state;
  state.blocks.push_back({LabelSet(Label::A) | Label::B, {0.0, 0.0}});
  return state;
}

AncestryState init_singletons(const std::array<TorusPoint, 4>& marks) {
  for (std::size_t i = 0; i < marks.size(); ++i) {
    for (std::size_t k = i + 1; k < marks.size(); ++k) {
      if (marks[i] == marks[k]) throw InvalidInput("singleton marks must be pairwise distinct");
    }
  }
  AncestryState state;
  for (std::size_t i = 0; i < 4; ++i) state.blocks.push_back({kLabelOrder[i], marks[i]});
  return state;
}

EventOutcome apply_event(AncestryState& state, const Event& event, const ModelParams& params,
                         RandomStream& rng) {
  struct Assignment {
    LabelSet labels;
    unsigned parent;
  };
  boost::container::small_vector<Assignment, 4> assigned;
  EventOutcome outcome;
  const unsigned j = event.num_parents;
  const bool may_recombine = event.kind == EventKind::small && j >= 2;
  const double side = params.side;
  const double recombination = params.recombination;

  std::size_t kept = 0;
  for (std::size_t i = 0; i < state.blocks.size(); ++i) {
    const Block block = state.blocks[i];
    if (!ball_covers(event.center, event.radius, block.mark, side) || !rng.bernoulli(event.impact)) {
      state.blocks[kept++] = block;
      continue;
    }
    ++outcome.affected;
    if (!may_recombine || !rng.bernoulli(recombination)) {
      assigned.push_back({block.labels, rng.below(j)});
      continue;
    }
    const unsigned first = rng.below(j);
    unsigned second = rng.below(j - 1);
    if (second >= first) ++second;
    const LabelSet locus1 = block.labels & kLocus1;
    const LabelSet locus2 = block.labels & kLocus2;
    if (!locus1.empty()) assigned.push_back({locus1, first});
    if (!locus2.empty()) assigned.push_back({locus2, second});
    if (!locus1.empty() && !locus2.empty()) outcome.split = true;
  }
  state.blocks.resize(kept);

  boost::container::small_vector<unsigned, 4> parents;
  boost::container::small_vector<unsigned, 4> group_sizes;
  for (const auto& a : assigned) {
    std::size_t g = 0;
    while (g < parents.size() && parents[g] != a.parent) ++g;
    if (g == parents.size()) {
      parents.push_back(a.parent);
      group_sizes.push_back(1);
      state.blocks.push_back({a.labels, event.parent_positions[a.parent]});
    } else {
      ++group_sizes[g];
      state.blocks[kept + g].labels |= a.labels;
    }
  }
  for (unsigned size : group_sizes) {
    if (size >= 2) ++outcome.merges;
  }
  state.time += event.dt;
  ++state.events;
  return outcome;
}

}  // namespace slfv

namespace slfv {

StepResult step(AncestryState& state, const EventStream& stream, RandomStream& rng) {
  const auto marks = state.marks();
  StepResult result{stream.next({marks.data(), marks.size()}, rng), {}};
  result.outcome = apply_event(state, result.event, stream.params(), rng);
  return result;
}

std::optional<std::string> check_invariants(const AncestryState& state, LabelSet expected, double side) {
  LabelSet seen;
  for (std::size_t i = 0; i < state.blocks.size(); ++i) {
    const Block& block = state.blocks[i];
    if (block.labels.empty()) return "empty block";
    if (seen.intersects(block.labels)) return "label appears in two blocks";
    seen |= block.labels;
    const auto& m = block.mark;
    if (!(m.x >= 0.0 && m.x < side && m.y >= 0.0 && m.y < side)) return "mark outside [0,L)";
    for (std::size_t k = i + 1; k < state.blocks.size(); ++k) {
      if (state.blocks[k].mark == m) return "two blocks share a mark";
    }
  }
  if (seen != expected) return "blocks do not cover the tracked labels";
  return std::nullopt;
}

void trace_trajectory(AncestryState state, const EventStream& stream, RandomStream& rng,
                      std::uint64_t max_events, double horizon, std::ostream& out) {
  char buf[64];
  auto write_row = [&] {
    std::snprintf(buf, sizeof buf, "%.17g,%llu,", state.time,
                  static_cast<unsigned long long>(state.events));
    out << buf;
    for (std::size_t i = 0; i < state.blocks.size(); ++i) {
      const auto& block = state.blocks[i];
      std::snprintf(buf, sizeof buf, "@%.17g:%.17g", block.mark.x, block.mark.y);
      out << (i ? ";" : "") << block.labels.to_string() << buf;
    }
    out << '\n';
  };
  out << "time,event,blocks\n";
  write_row();
  for (std::uint64_t n = 0; n < max_events; ++n) {
    const auto marks = state.marks();
    const Event event = stream.next({marks.data(), marks.size()}, rng);
    if (state.time + event.dt > horizon) break;
    apply_event(state, event, stream.params(), rng);
    write_row();
  }
}

}  // namespace slfv
