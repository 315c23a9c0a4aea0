#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <boost/container/static_vector.hpp>

#include "slfv/events.hpp"
#include "slfv/geometry.hpp"
#include "slfv/random.hpp"

namespace slfv {

/// The four sampled lineages: locus 1 of individuals (A,B) and (a,b) is A/a,
/// locus 2 is B/b.
enum class Label : std::uint8_t { A = 1, a = 2, B = 4, b = 8 };

/// Subset of {A, a, B, b} as a bit set.
class LabelSet {
 public:
  constexpr LabelSet() = default;
  constexpr explicit LabelSet(std::uint8_t bits) : bits_(bits & 0xF) {}
  constexpr LabelSet(Label l) : bits_(static_cast<std::uint8_t>(l)) {}  // NOLINT(implicit)

  constexpr std::uint8_t bits() const noexcept { return bits_; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr bool contains(LabelSet other) const noexcept { return (bits_ & other.bits_) == other.bits_; }
  constexpr bool intersects(LabelSet other) const noexcept { return (bits_ & other.bits_) != 0; }
  int size() const noexcept;

  constexpr LabelSet operator|(LabelSet o) const noexcept { return LabelSet(bits_ | o.bits_); }
  constexpr LabelSet operator&(LabelSet o) const noexcept { return LabelSet(bits_ & o.bits_); }
  constexpr LabelSet& operator|=(LabelSet o) noexcept { bits_ |= o.bits_; return *this; }
  friend constexpr bool operator==(LabelSet, LabelSet) = default;

  std::string to_string() const;

 private:
  std::uint8_t bits_ = 0;
};

inline constexpr LabelSet kLocus1 = LabelSet(Label::A) | LabelSet(Label::a);
inline constexpr LabelSet kLocus2 = LabelSet(Label::B) | LabelSet(Label::b);
inline constexpr LabelSet kAllLabels = kLocus1 | kLocus2;
inline constexpr std::array<Label, 4> kLabelOrder{Label::A, Label::a, Label::B, Label::b};

/// An ancestral individual: the labels it carries and where it lives.
struct Block {
  LabelSet labels;
  TorusPoint mark;
};

/// Marked partition of the tracked labels, evolving backward in time.
struct AncestryState {
  double time = 0.0;
  std::uint64_t events = 0;  ///< accepted events applied so far
  boost::container::static_vector<Block, 4> blocks;

  boost::container::static_vector<TorusPoint, 4> marks() const;
  LabelSet tracked() const noexcept;
  /// Index of the block holding the label; the label must be tracked.
  std::size_t block_of(Label label) const noexcept;
  bool together(Label x, Label y) const noexcept { return block_of(x) == block_of(y); }
  /// Torus distance between the blocks holding x and y.
  double separation(Label x, Label y, double side) const noexcept;
};

/// {A,B} at the origin and {a,b} at origin + separation.
AncestryState init_two_individuals(Displacement separation, double side);
/// {A} at the origin and {a} at origin + separation.
AncestryState init_single_locus_pair(Displacement separation, double side);
/// {A,B} alone at the origin.
AncestryState init_same_individual();
/// A, a, B, b as four singletons at the given (pairwise distinct) marks.
AncestryState init_singletons(const std::array<TorusPoint, 4>& marks);

struct EventOutcome {
  unsigned affected = 0;  ///< blocks that passed the impact draw
  unsigned merges = 0;    ///< parents that received two or more label groups
  bool split = false;     ///< a recombinant draw separated the two loci of a block
};

/// Applies one event to the blocks it covers: impact draw per covered block,
/// parent choice (recombinant split for small events with j >= 2), then
/// merge of all label groups sharing a parent at that parent's position.
/// Advances time by event.dt.
EventOutcome apply_event(AncestryState& state, const Event& event, const ModelParams& params,
                         RandomStream& rng);

struct StepResult {
  Event event;
  EventOutcome outcome;
};

/// Draws the next event for the current marks and applies it.
StepResult step(AncestryState& state, const EventStream& stream, RandomStream& rng);

/// Returns a description of the first broken invariant, if any: partition of
/// the expected label set, nonempty blocks, pairwise distinct marks,
/// canonical coordinates.
std::optional<std::string> check_invariants(const AncestryState& state, LabelSet expected, double side);

/// Writes `time,event,blocks` CSV rows (blocks as `labels@x:y` joined by ';')
/// for up to max_events events or until the horizon.
void trace_trajectory(AncestryState state, const EventStream& stream, RandomStream& rng,
                      std::uint64_t max_events, double horizon, std::ostream& out);

}  // namespace slfv
