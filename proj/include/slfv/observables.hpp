#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "slfv/ancestry.hpp"
#include "slfv/events.hpp"

namespace slfv {

/// A first-passage time, or the horizon when the run stopped first.
struct StoppingTime {
  double value = 0.0;
  bool censored = false;

  static StoppingTime observed(double t) noexcept { return {t, false}; }
  static StoppingTime censored_at(double horizon) noexcept { return {horizon, true}; }
};

/// Counts invariant violations along trajectories. Attach one to a runner to
/// audit every step; the runners skip all checks when none is attached.
class InvariantAudit {
 public:
  void observe(const AncestryState& before, const StepResult& step, const AncestryState& after,
               const EventStream& stream);
  void check_order(StoppingTime gathering, StoppingTime coalescence);

  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t violations() const noexcept { return violations_.size(); }
  const std::vector<std::string>& messages() const noexcept { return violations_; }

 private:
  void fail(std::string message);

  std::uint64_t steps_ = 0;
  std::vector<std::string> violations_;
};

struct PairRun {
  StoppingTime coalescence;  ///< tau: first time A and a share a block
  StoppingTime gathering;    ///< T: first time at separation <= 2 R_B L^alpha
  std::uint64_t events = 0;
};

/// Two single-locus lineages {A}, {a} started `separation` apart.
PairRun run_single_locus_pair(const EventStream& stream, Displacement separation, double horizon,
                              RandomStream& rng, InvariantAudit* audit = nullptr);

struct RunRecord {
  StoppingTime tau_Aa;
  StoppingTime tau_Bb;
  StoppingTime gather_Aa;
  StoppingTime gather_Bb;
  bool equal_coalescence = false;  ///< both pairs merged in the same event
  std::uint64_t merge_event_Aa = 0;
  std::uint64_t merge_event_Bb = 0;
  double horizon = 0.0;
  std::uint64_t events = 0;

  /// min(tau_Aa, tau_Bb); censored only if both are.
  StoppingTime first_coalescence() const noexcept;
};

/// Standard two-individual start {A,B}, {a,b}; runs until both loci have
/// coalesced or the horizon is reached.
RunRecord run_two_locus(const EventStream& stream, Displacement separation, double horizon,
                        RandomStream& rng, InvariantAudit* audit = nullptr);

/// Effective recombination time S, in units of rho: first time a large event
/// affects a block while A and B sit in different individuals. Starts from {A,B}.
/// `horizon` is in original time units.
StoppingTime run_effective_recombination(const EventStream& stream, double horizon, RandomStream& rng,
                                         InvariantAudit* audit = nullptr);

/// First time (units of rho) the A and B lineages are more than 3 R_B L^alpha
/// apart. Starts from {A,B}; `horizon` in original units.
StoppingTime run_separation_exit(const EventStream& stream, double horizon, RandomStream& rng,
                                 InvariantAudit* audit = nullptr);

/// Separation of the A and B lineages, in units of L^alpha, at rescaled time
/// `snapshot` (original time snapshot * rho). Starts from {A,B}.
double run_decorrelation_snapshot(const EventStream& stream, double snapshot, RandomStream& rng,
                                  InvariantAudit* audit = nullptr);

/// Unordered pairs of the four singleton lineages, in the order
/// (A,a) (A,B) (A,b) (a,B) (a,b) (B,b); index into kLabelOrder.
inline constexpr std::array<std::array<int, 2>, 6> kLineagePairs{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

struct PairingResult {
  int pair = -1;          ///< index into kLineagePairs; -1 for none or a multiple merger
  bool multiple = false;  ///< the first merging event joined more than two lineages
  StoppingTime time;
};

/// Four singleton lineages; runs to the first merger.
PairingResult run_kingman_pairing(const EventStream& stream, const std::array<TorusPoint, 4>& marks,
                                  double horizon, RandomStream& rng, InvariantAudit* audit = nullptr);

}  // namespace slfv
