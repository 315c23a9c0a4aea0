#include <doctest.h>

#include <sstream>

#include "slfv/ancestry.hpp"
#include "slfv/error.hpp"
#include "slfv/events.hpp"
#include "slfv/geometry.hpp"

using namespace slfv;

namespace {

Event make_event(EventKind kind, TorusPoint center, double radius, double impact,
                 std::initializer_list<TorusPoint> parents) {
  Event e;
  e.dt = 0.25;
  e.kind = kind;
  e.center = center;
  e.radius = radius;
  e.impact = impact;
  e.num_parents = static_cast<unsigned>(parents.size());
  for (const auto& z : parents) e.parent_positions.push_back(z);
  return e;
}

const Block* find_block(const AncestryState& s, LabelSet labels) {
  for (const auto& b : s.blocks) {
    if (b.labels == labels) return &b;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("label sets") {
  CHECK(kAllLabels.size() == 4);
  CHECK(kLocus1.contains(Label::A));
  CHECK_FALSE(kLocus1.intersects(kLocus2));
  CHECK((LabelSet(Label::A) | Label::B).to_string() == "AB");
}

TEST_CASE("initial states") {
  const auto two = init_two_individuals({std::pow(256.0, 0.85), 0}, 256);
  REQUIRE(two.blocks.size() == 2);
  CHECK(two.blocks[0].labels == (LabelSet(Label::A) | Label::B));
  CHECK(two.blocks[0].mark == TorusPoint{0, 0});
  CHECK(two.blocks[1].mark.x == doctest::Approx(std::pow(256.0, 0.85)));
  CHECK(two.time == 0.0);
  CHECK(init_same_individual().blocks.size() == 1);
  CHECK(init_singletons({TorusPoint{1, 1}, {1, 2}, {2, 1}, {2, 2}}).blocks.size() == 4);
  CHECK_THROWS_AS(init_two_individuals({0, 0}, 256), InvalidInput);
  CHECK_THROWS_AS(init_single_locus_pair({0, 0}, 256), InvalidInput);
  CHECK_FALSE(check_invariants(two, kAllLabels, 256).has_value());
}

TEST_CASE("blocks outside the ball are untouched") {
  ModelParams p;
  auto s = init_two_individuals({50, 0}, p.side);
  const auto before = s.blocks;
  RandomStream rng(1, 0);
  const auto out = apply_event(s, make_event(EventKind::small, {20, 20}, 1, 1.0, {{20, 20.5}, {20.5, 20}}), p, rng);
  CHECK(out.affected == 0);
  REQUIRE(s.blocks.size() == 2);
  CHECK(s.blocks[0].mark == before[0].mark);
  CHECK(s.blocks[1].mark == before[1].mark);
  CHECK(s.time == 0.25);
  CHECK(s.events == 1);
}

TEST_CASE("recombinant small event splits the loci onto the two parents") {
  ModelParams p;
  p.recombination = 1.0;  // forces the recombinant branch
  const TorusPoint z1{0.5, 0}, z2{0, 0.5};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AncestryState s = init_same_individual();
    RandomStream rng(seed, 0);
    const auto out = apply_event(s, make_event(EventKind::small, {0, 0}, 1, 1.0, {z1, z2}), p, rng);
    CHECK(out.split);
    REQUIRE(s.blocks.size() == 2);
    const Block* a = find_block(s, Label::A);
    const Block* b = find_block(s, Label::B);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(((a->mark == z1 && b->mark == z2) || (a->mark == z2 && b->mark == z1)));
  }
}

TEST_CASE("large events never recombine and merge blocks sharing a parent") {
  ModelParams p;
  p.recombination = 1.0;
  const TorusPoint z{5, 5};
  AncestryState s = init_single_locus_pair({3, 0}, p.side);
  RandomStream rng(2, 0);
  const auto out = apply_event(s, make_event(EventKind::large, {1.5, 0}, 16, 1.0, {z}), p, rng);
  CHECK(out.merges == 1);
  CHECK_FALSE(out.split);
  REQUIRE(s.blocks.size() == 1);
  CHECK(s.blocks[0].labels == (LabelSet(Label::A) | Label::a));
  CHECK(s.blocks[0].mark == z);

  AncestryState t = init_same_individual();
  for (int i = 0; i < 200; ++i) {
    apply_event(t, make_event(EventKind::large, t.blocks[0].mark, 16, 1.0, {{7, 7}, {9, 9}}), p, rng);
    REQUIRE(t.blocks.size() == 1);
  }
}

TEST_CASE("r = 0 never splits") {
  ModelParams p;
  p.recombination = 0.0;
  EventStream stream(p);
  RandomStream rng(3, 0);
  AncestryState s = init_two_individuals({5, 0}, p.side);
  for (int i = 0; i < 20000; ++i) {
    const auto r = step(s, stream, rng);
    REQUIRE_FALSE(r.outcome.split);
    REQUIRE(s.together(Label::A, Label::B));
    REQUIRE(s.together(Label::a, Label::b));
  }
}

TEST_CASE("single-locus states never gain blocks") {
  ModelParams p;
  p.recombination = 1.0;
  EventStream stream(p);
  RandomStream rng(4, 0);
  AncestryState s = init_single_locus_pair({3, 0}, p.side);
  std::size_t prev = s.blocks.size();
  for (int i = 0; i < 20000 && s.blocks.size() > 1; ++i) {
    step(s, stream, rng);
    REQUIRE(s.blocks.size() <= prev);
    prev = s.blocks.size();
  }
}

TEST_CASE("a fully coalesced block only splits by locus") {
  ModelParams p;
  p.recombination = 0.5;
  EventStream stream(p);
  RandomStream rng(5, 0);
  AncestryState s;
  s.blocks.push_back({kAllLabels, {0, 0}});
  int splits = 0;
  for (int i = 0; i < 20000; ++i) {
    const std::size_t before = s.blocks.size();
    step(s, stream, rng);
    if (s.blocks.size() > before) {
      ++splits;
      REQUIRE(s.blocks.size() == 2);
      REQUIRE(s.together(Label::A, Label::a));
      REQUIRE(s.together(Label::B, Label::b));
    }
  }
  CHECK(splits > 0);
}

TEST_CASE("invariants and jump bound along random trajectories") {
  ModelParams p;
  p.recombination = 0.3;
  p.small_parents = ParentCountLaw({0.2, 0.5, 0.3});
  EventStream stream(p);
  RandomStream rng(6, 0);
  AncestryState s = init_singletons({TorusPoint{0, 0}, {3, 0}, {0, 3}, {3, 3}});
  const LabelSet labels = s.tracked();
  for (int i = 0; i < 50000; ++i) {
    const auto before = s;
    const auto r = step(s, stream, rng);
    REQUIRE(s.time > before.time);
    const auto broken = check_invariants(s, labels, p.side);
    REQUIRE_MESSAGE(!broken, *broken);
    for (Label l : kLabelOrder) {
      const double jump = distance(before.blocks[before.block_of(l)].mark, s.blocks[s.block_of(l)].mark, p.side);
      REQUIRE(jump <= 2 * r.event.radius + 1e-9);
    }
    if (before.together(Label::A, Label::a)) REQUIRE(s.together(Label::A, Label::a));
    if (before.together(Label::B, Label::b)) REQUIRE(s.together(Label::B, Label::b));
  }
}

TEST_CASE("trajectory trace") {
  ModelParams p;
  EventStream stream(p);
  RandomStream rng(7, 0);
  std::ostringstream out;
  trace_trajectory(init_two_individuals({4, 0}, p.side), stream, rng, 5, 1e9, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,event,blocks");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows >= 5);
}
