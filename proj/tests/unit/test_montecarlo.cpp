#include <doctest.h>

#include <cmath>
#include <numeric>

#include "slfv/montecarlo.hpp"

using namespace slfv;

namespace {

// small torus so that trajectories are cheap: L^alpha = 8, timescale(1) = 1024
ModelParams small_model() {
  ModelParams p;
  p.side = 64;
  p.rho = 16;
  p.beta = 0.75;
  return p;
}

EstimatorConfig config(std::size_t replicates, std::uint64_t seed) {
  EstimatorConfig c;
  c.replicates = replicates;
  c.seed = seed;
  return c;
}

double mean_of(const std::vector<StoppingTime>& v) {
  double s = 0.0;
  for (const auto& t : v) s += t.value;
  return s / v.size();
}

}  // namespace

TEST_CASE("wilson interval") {
  const auto e = wilson_interval(30, 100, 0.95);
  CHECK(e.estimate == doctest::Approx(0.3));
  // reference value of the 95% Wilson score interval for 30/100
  CHECK(e.ci_lo == doctest::Approx(0.2189).epsilon(1e-3));
  CHECK(e.ci_hi == doctest::Approx(0.3958).epsilon(1e-3));
  CHECK(wilson_interval(0, 10, 0.95).ci_lo == 0.0);
  CHECK(wilson_interval(10, 10, 0.95).ci_hi == doctest::Approx(1.0));

  // coverage on a synthetic Bernoulli stream
  RandomStream rng(1, 0);
  int covered = 0;
  const int trials = 2000;
  for (int k = 0; k < trials; ++k) {
    std::size_t s = 0;
    for (int i = 0; i < 100; ++i) s += rng.bernoulli(0.3);
    const auto ci = wilson_interval(s, 100, 0.95);
    covered += ci.ci_lo <= 0.3 && 0.3 <= ci.ci_hi;
  }
  CHECK(double(covered) / trials > 0.93);
  CHECK(double(covered) / trials < 0.97);
}

TEST_CASE("survival curve bookkeeping") {
  const auto s = derive_scales(small_model());
  std::vector<StoppingTime> times{StoppingTime::observed(10), StoppingTime::observed(2000),
                                  StoppingTime::censored_at(5000), StoppingTime::observed(3000)};
  EstimatorConfig c;
  c.t_grid = {0.5, 1.0};                 // thresholds 16 and 1024
  c.phase2_grid = {0.0, 1e6};
  const auto curve = survival_curve("x", times, s, c);
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].threshold == doctest::Approx(16));
  CHECK(curve.points[0].survival.estimate == doctest::Approx(0.75));
  CHECK(curve.points[1].survival.estimate == doctest::Approx(0.75));
  CHECK(curve.phase2_points[0].survival.estimate == 1.0);
  // beyond every time: the censored replicate drops out
  CHECK(curve.phase2_points[1].survival.estimate == 0.0);
  CHECK(curve.phase2_points[1].survival.n == 3);
  CHECK(curve.phase2_points[1].survival.censored == 1);

  EstimatorConfig bad;
  bad.t_grid = {1.0, 0.9};
  CHECK_THROWS(check_config(bad));
}

TEST_CASE("chi-square and Kolmogorov-Smirnov") {
  const std::array<std::size_t, 3> even{10, 10, 10};
  CHECK(chi_square_equal(even).statistic == 0.0);
  CHECK(chi_square_equal(even).p_value == doctest::Approx(1.0));
  const std::array<std::size_t, 2> skew{20, 10};
  CHECK(chi_square_equal(skew).statistic == doctest::Approx(10.0 / 3));
  CHECK(chi_square_equal(skew).p_value == doctest::Approx(0.0679).epsilon(1e-3));

  std::vector<double> a, b, c;
  RandomStream rng(2, 0);
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.uniform());
    b.push_back(rng.uniform());
    c.push_back(rng.uniform() + 0.2);
  }
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("replicate runner is independent of the worker count") {
  auto fn = [](RandomStream& rng, std::size_t i) { return rng() ^ i; };
  const auto one = run_replicates(500, 9, 1, fn);
  const auto four = run_replicates(500, 9, 4, fn);
  CHECK(one == four);

  const auto p = small_model();
  auto c = config(40, 3);
  auto a = simulate_two_locus(p, sampling_separation(p), c);
  c.workers = 3;
  auto b = simulate_two_locus(p, sampling_separation(p), c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].tau_Aa.value == b[i].tau_Aa.value);
    REQUIRE(a[i].tau_Bb.value == b[i].tau_Bb.value);
    REQUIRE(a[i].events == b[i].events);
  }
}

TEST_CASE("gathering precedes coalescence") {
  const auto p = small_model();
  EventStream stream(p);
  const double horizon = default_horizon(stream.scales());
  InvariantAudit audit;
  double gap = 0.0;
  int gaps = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    RandomStream rng(4, i);
    const auto r = run_two_locus(stream, sampling_separation(p), horizon, rng, &audit);
    for (auto [T, tau] : {std::pair{r.gather_Aa, r.tau_Aa}, std::pair{r.gather_Bb, r.tau_Bb}}) {
      if (!T.censored && !tau.censored) {
        REQUIRE(T.value <= tau.value);
        gap += tau.value - T.value;
        ++gaps;
      }
    }
    REQUIRE(r.first_coalescence().value <= std::max(r.tau_Aa.value, r.tau_Bb.value));
    if (r.equal_coalescence) REQUIRE(r.merge_event_Aa == r.merge_event_Bb);
  }
  CHECK(audit.violations() == 0);
  CHECK(audit.steps() > 0);
  // regression bound on mean(tau - T), measured once at about 130 rho
  REQUIRE(gaps > 0);
  CHECK(gap / gaps < 200 * p.rho);

  RandomStream rng(5, 0);
  const auto close = run_single_locus_pair(stream, {10, 0}, horizon, rng);
  CHECK(close.gathering.value == 0.0);
  CHECK_FALSE(close.gathering.censored);
}

TEST_CASE("equal coalescence against r") {
  auto p = small_model();
  p.recombination = 0.0;
  CHECK(estimate_equal_coalescence(p, config(200, 6)).estimate == 1.0);

  std::vector<double> values;
  for (double r : {0.0, 0.02, 0.5}) {
    p.recombination = r;
    values.push_back(estimate_equal_coalescence(p, config(400, 7)).estimate);
  }
  CHECK(values[0] >= values[1]);
  CHECK(values[1] >= values[2]);

  // decorrelated regime: r = 1, rho near log L, far sampling
  p.recombination = 1.0;
  p.rho = 5;
  p.beta = 0.8;
  CHECK(estimate_equal_coalescence(p, config(300, 8)).estimate < 0.2);
}

TEST_CASE("single-locus law is shared by both setups") {
  const auto p = small_model();
  auto c = config(3000, 10);
  const auto pairs = simulate_pairs(p, sampling_separation(p), c);
  c.seed = 11;
  const auto two = simulate_two_locus(p, sampling_separation(p), c);
  std::vector<double> x, y, z;
  for (const auto& t : coalescence_times(pairs)) x.push_back(t.value);
  for (const auto& t : locus_times(two, 1)) y.push_back(t.value);
  for (const auto& t : locus_times(two, 2)) z.push_back(t.value);
  CHECK(ks_two_sample(x, y).p_value > 0.01);
  CHECK(ks_two_sample(x, z).p_value > 0.01);
}

TEST_CASE("r does not affect the single-locus pair") {
  auto p = small_model();
  auto c = config(2000, 12);
  p.recombination = 1.0;
  const auto a = simulate_pairs(p, sampling_separation(p), c);
  p.recombination = 0.01;
  c.seed = 13;
  const auto b = simulate_pairs(p, sampling_separation(p), c);
  std::vector<double> x, y;
  for (const auto& t : coalescence_times(a)) x.push_back(t.value);
  for (const auto& t : coalescence_times(b)) y.push_back(t.value);
  CHECK(ks_two_sample(x, y).p_value > 0.01);
}

TEST_CASE("survival estimates") {
  const auto p = small_model();
  auto c = config(400, 14);
  c.t_grid = {0.75, 0.8, 0.9, 1.0};
  c.phase2_grid = {0.0, 1.0};
  const auto curves = estimate_survival(SurvivalKind::single, p, c);
  REQUIRE(curves.size() == 1);
  const auto& pts = curves[0].points;
  CHECK(pts[0].survival.estimate > 0.9);  // rarely gathered by timescale(beta)
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].survival.estimate <= pts[i - 1].survival.estimate);
  CHECK(curves[0].phase2_points[0].survival.estimate == 1.0);
  CHECK(estimate_survival(SurvivalKind::per_locus, p, c).size() == 2);
  CHECK(estimate_survival(SurvivalKind::joint_min, p, c).size() == 1);

  // first passage to the gathering radius becomes more likely with t
  EventStream stream(p);
  std::vector<StoppingTime> gathering;
  for (std::uint64_t i = 0; i < 200; ++i) {
    RandomStream rng(15, i);
    gathering.push_back(run_single_locus_pair(stream, sampling_separation(p), default_horizon(stream.scales()), rng).gathering);
  }
  double prev = -1.0;
  for (double t : {0.75, 0.85, 0.95, 1.0}) {
    double hit = 0;
    for (const auto& g : gathering) hit += !g.censored && g.value <= stream.scales().timescale(t);
    CHECK(hit >= prev);
    prev = hit;
  }
}

TEST_CASE("identity by descent") {
  const auto p = small_model();
  auto c = config(300, 16);
  const std::vector<double> thetas{0.0, 1e-3, 1e3};
  const auto ibd = estimate_ibd(p, c, thetas);
  REQUIRE(ibd.size() == 3);
  CHECK(ibd[0].estimate == doctest::Approx(1.0));
  CHECK(ibd[1].estimate < 1.0);
  CHECK(ibd[1].estimate <= ibd[1].upper);
  CHECK(ibd[2].estimate < 1e-6);

  // fast recombination: joint close to the product of the marginals
  auto q = small_model();
  q.recombination = 0.5;
  const auto recs = simulate_two_locus(q, sampling_separation(q), config(3000, 17));
  const double theta = 1e-3;
  const auto joint = joint_ibd(recs, theta, theta, 0.95);
  const auto a = ibd_from_times(locus_times(recs, 1), theta, 0.95);
  const auto b = ibd_from_times(locus_times(recs, 2), theta, 0.95);
  CHECK(std::abs(joint.estimate - a.estimate * b.estimate) < 3 * (joint.ci_hi - joint.ci_lo));
}

TEST_CASE("recombination observables") {
  auto p = small_model();
  EventStream zero([&] {
    auto z = p;
    z.recombination = 0.0;
    return z;
  }());
  for (std::uint64_t i = 0; i < 5; ++i) {
    RandomStream rng(18, i);
    CHECK(run_effective_recombination(zero, 1e4, rng).censored);
  }

  std::vector<double> means;
  for (double r : {0.5, 0.1, 0.02}) {
    p.recombination = r;
    EventStream stream(p);
    std::vector<StoppingTime> s;
    for (std::uint64_t i = 0; i < 300; ++i) {
      RandomStream rng(19, i);
      s.push_back(run_effective_recombination(stream, 1e7, rng));
    }
    means.push_back(mean_of(s));
  }
  CHECK(means[0] < means[1]);
  CHECK(means[1] < means[2]);

  p = small_model();
  p.recombination = 0.5;
  std::vector<double> exits;
  for (double u : {0.2, 0.6}) {
    p.large_impact = u;
    EventStream stream(p);
    std::vector<StoppingTime> s;
    for (std::uint64_t i = 0; i < 300; ++i) {
      RandomStream rng(20, i);
      s.push_back(run_separation_exit(stream, 1e7, rng));
      REQUIRE(s.back().value > 0.0);
    }
    exits.push_back(mean_of(s));
  }
  CHECK(exits[1] < exits[0]);

  EventStream stream(p);
  RandomStream rng(21, 0);
  CHECK(run_decorrelation_snapshot(stream, 0.0, rng) == 0.0);
  const double bound = std::pow(p.side, 1 - p.alpha) * std::sqrt(2.0) / 2;
  for (std::uint64_t i = 0; i < 100; ++i) {
    RandomStream r(22, i);
    const double x = run_decorrelation_snapshot(stream, 200.0, r);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= bound + 1e-9);
  }
}

TEST_CASE("pairing distribution") {
  const auto p = small_model();
  auto c = config(600, 23);
  const auto square = estimate_pairing_distribution(p, PairingLayout::square, 20.0, c);
  CHECK(square.replicates == 600);
  CHECK(std::accumulate(square.counts.begin(), square.counts.end(), std::size_t{0}) + square.multiple +
            square.censored ==
        600);
  CHECK(square.resolved() + square.multiple + square.censored == 600);
  CHECK(square.p_sides > 0.001);
  CHECK(square.p_diagonals > 0.001);

  RandomStream rng(24, 0);
  for (int i = 0; i < 50; ++i) {
    const auto m = far_random_marks(20.0, p.side, rng);
    for (const auto& [a, b] : kLineagePairs) {
      const double d = distance(m[a], m[b], p.side);
      REQUIRE(d >= 10.0);
      REQUIRE(d <= 40.0);
    }
  }
  const auto sq = square_marks(20.0, 64.0);
  CHECK(distance(sq[0], sq[1], 64) == doctest::Approx(20.0));
  CHECK(distance(sq[0], sq[2], 64) == doctest::Approx(20.0 * std::sqrt(2.0)));
}
