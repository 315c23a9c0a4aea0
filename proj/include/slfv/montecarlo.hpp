#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "slfv/model.hpp"
#include "slfv/observables.hpp"
#include "slfv/random.hpp"

namespace slfv {

struct EstimatorConfig {
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  double horizon = 0.0;              ///< original time units; 0 selects default_horizon()
  std::vector<double> t_grid;        ///< exponents t, thresholds rho L^(2(t - alpha))
  std::vector<double> phase2_grid;   ///< multipliers m, thresholds m * equilibrium scale
  double confidence = 0.95;
  unsigned workers = 1;              ///< 0 means one per hardware thread
};

/// 50 rho L^(2(1 - alpha)).
double default_horizon(const DerivedScales& scales);
double effective_horizon(const EstimatorConfig& config, const DerivedScales& scales);

/// Throws ConfigError unless replicates >= 1 and both grids are sorted ascending.
void check_config(const EstimatorConfig& config);

/// Runs fn(rng, index) for index in [0, replicates), each on its own random
/// stream (seed, index). Results are stored by index, so the output does not
/// depend on the number of workers or on scheduling.
template <class Fn>
auto run_replicates(std::size_t replicates, std::uint64_t seed, unsigned workers, Fn fn)
    -> std::vector<decltype(fn(std::declval<RandomStream&>(), std::size_t{}))> {
  using Record = decltype(fn(std::declval<RandomStream&>(), std::size_t{}));
  std::vector<Record> records(replicates);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(replicates, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < replicates; i = next++) {
      try {
        RandomStream rng(seed, i);
        records[i] = fn(rng, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = replicates;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

/// Binomial proportion with a Wilson score interval.
struct ProportionEstimate {
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t successes = 0;
  std::size_t n = 0;
  std::size_t censored = 0;
};

ProportionEstimate wilson_interval(std::size_t successes, std::size_t n, double confidence);

struct SurvivalPoint {
  double t_exponent = 0.0;  ///< exponent t, or the multiplier m for phase-2 points
  double threshold = 0.0;   ///< original time units
  ProportionEstimate survival;
};

struct SurvivalCurve {
  std::string name;
  std::vector<SurvivalPoint> points;
  std::vector<SurvivalPoint> phase2_points;
};

/// Evaluates 1{time > threshold} for every threshold. A censored time is
/// known to exceed thresholds up to its horizon; beyond that the replicate
/// is left out and counted as censored.
SurvivalCurve survival_curve(std::string name, std::span<const StoppingTime> times, const DerivedScales& scales,
                             const EstimatorConfig& config);

enum class SurvivalKind { single, joint_min, per_locus };

/// Sampling separation (L^beta, 0); requires params.beta and L^beta < L/2.
Displacement sampling_separation(const ModelParams& params);

std::vector<PairRun> simulate_pairs(const ModelParams& params, Displacement separation,
                                    const EstimatorConfig& config);
std::vector<RunRecord> simulate_two_locus(const ModelParams& params, Displacement separation,
                                          const EstimatorConfig& config);

/// single: one curve from run_single_locus_pair. joint_min: min(tau_Aa, tau_Bb).
/// per_locus: two curves, tau_Aa then tau_Bb, from the same two-locus runs.
std::vector<SurvivalCurve> estimate_survival(SurvivalKind kind, const ModelParams& params,
                                             const EstimatorConfig& config);

std::vector<StoppingTime> coalescence_times(std::span<const PairRun> runs);
std::vector<StoppingTime> locus_times(std::span<const RunRecord> records, int locus);
std::vector<StoppingTime> first_coalescence_times(std::span<const RunRecord> records);

/// Fraction of replicates whose two loci coalesced in the same event.
/// Replicates with a censored locus count as unequal and are tallied in `censored`.
ProportionEstimate equal_coalescence(std::span<const RunRecord> records, double confidence);
ProportionEstimate estimate_equal_coalescence(const ModelParams& params, const EstimatorConfig& config);

struct IbdEstimate {
  double theta = 0.0;
  double estimate = 0.0;  ///< mean of exp(-2 theta tau); censored replicates contribute 0
  double upper = 0.0;     ///< same with censored replicates at exp(-2 theta horizon)
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n = 0;
  std::size_t censored = 0;
};

IbdEstimate ibd_from_times(std::span<const StoppingTime> times, double theta, double confidence);
/// Mean of exp(-2 theta1 tau_Aa - 2 theta2 tau_Bb).
IbdEstimate joint_ibd(std::span<const RunRecord> records, double theta1, double theta2, double confidence);
std::vector<IbdEstimate> estimate_ibd(const ModelParams& params, const EstimatorConfig& config,
                                      std::span<const double> thetas);

enum class PairingLayout { square, far_random };

struct PairingDistribution {
  std::array<std::size_t, 6> counts{};
  std::size_t multiple = 0;
  std::size_t censored = 0;
  std::size_t replicates = 0;
  double chi2_uniform = 0.0;
  double p_uniform = 1.0;
  double chi2_sides = 0.0;  ///< square layout: equality of the four side pairs
  double p_sides = 1.0;
  double chi2_diagonals = 0.0;
  double p_diagonals = 1.0;

  std::size_t resolved() const noexcept;
  std::array<double, 6> frequencies() const noexcept;
};

/// Square of the given side centred in the torus; labels A, a, B, b at
/// consecutive vertices.
std::array<TorusPoint, 4> square_marks(double square_side, double torus_side);
/// Four uniform points with every pairwise distance in [d/2, 2d].
std::array<TorusPoint, 4> far_random_marks(double d, double torus_side, RandomStream& rng);

/// Pair indices (into kLineagePairs) of the square's sides and diagonals.
inline constexpr std::array<int, 4> kSquareSides{0, 3, 5, 2};
inline constexpr std::array<int, 2> kSquareDiagonals{1, 4};

/// `scale` is the square side (square layout) or the target pairwise
/// distance (far_random layout).
PairingDistribution estimate_pairing_distribution(const ModelParams& params, PairingLayout layout, double scale,
                                                  const EstimatorConfig& config);

struct ChiSquare {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Pearson test of equal cell probabilities among the given counts.
ChiSquare chi_square_equal(std::span<const std::size_t> counts);

struct KolmogorovSmirnov {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample test with the asymptotic Kolmogorov distribution.
KolmogorovSmirnov ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace slfv
