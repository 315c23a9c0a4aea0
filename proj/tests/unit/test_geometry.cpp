#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slfv/error.hpp"
#include "slfv/geometry.hpp"
#include "slfv/random.hpp"

using namespace slfv;
using std::numbers::pi;

namespace {

template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// chord integration, independent of the arccos formula
double lens_by_chords(double R, double d) {
  if (d >= 2 * R) return 0.0;
  return 2.0 * simpson([R](double x) { return 2.0 * std::sqrt(std::max(0.0, R * R - x * x)); }, d / 2, R, 200000);
}

}  // namespace

TEST_CASE("wrap") {
  CHECK(wrap(11.5, -0.5, 10) == TorusPoint{1.5, 9.5});
  CHECK(wrap(0, 0, 10) == TorusPoint{0, 0});
  CHECK(wrap(10, 10, 10) == TorusPoint{0, 0});
  const auto p = wrap(-1e-18, 3, 10);
  CHECK(p.x >= 0.0);
  CHECK(p.x < 10.0);
  CHECK_THROWS_AS(wrap(NAN, 0, 10), InvalidInput);
  CHECK_THROWS_AS(wrap(0, INFINITY, 10), InvalidInput);
  CHECK_THROWS_AS(wrap(0, 0, 0), InvalidInput);
}

TEST_CASE("displacement and distance") {
  const auto d = displacement({1, 1}, {9, 9}, 10);
  CHECK(d == Displacement{2, 2});
  CHECK(d.norm() == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(displacement({3, 4}, {3, 4}, 10) == Displacement{0, 0});
  CHECK(displacement({4, 0}, {0, 0}, 10) == Displacement{4, 0});
  CHECK(translate({9, 9}, {2, 2}, 10) == TorusPoint{1, 1});
}

TEST_CASE("displacement antisymmetry and triangle inequality") {
  RandomStream rng(5, 0);
  const double L = 17.0;
  for (int i = 0; i < 20000; ++i) {
    const TorusPoint a{rng.uniform() * L, rng.uniform() * L};
    const TorusPoint b{rng.uniform() * L, rng.uniform() * L};
    const TorusPoint c{rng.uniform() * L, rng.uniform() * L};
    const auto ab = displacement(a, b, L);
    const auto ba = displacement(b, a, L);
    REQUIRE(std::abs(ab.dx) <= L / 2);
    REQUIRE(std::abs(ab.dy) <= L / 2);
    // equal up to the -L/2 boundary
    REQUIRE(std::fmod(std::abs(ab.dx + ba.dx), L) == doctest::Approx(0.0).epsilon(1e-9));
    REQUIRE(distance(a, b, L) == doctest::Approx(distance(b, a, L)));
    REQUIRE(distance(a, c, L) <= distance(a, b, L) + distance(b, c, L) + 1e-12);
    const auto back = translate(b, ab, L);
    REQUIRE(distance(back, a, L) < 1e-9);
  }
}

TEST_CASE("lens area values") {
  CHECK(lens_area(1, 0) == doctest::Approx(pi));
  CHECK(lens_area(1, 2) == 0.0);
  CHECK(lens_area(1, 3) == 0.0);
  CHECK(lens_area(1, 1) == doctest::Approx(1.228370).epsilon(1e-6));
  for (double d : {0.0, 0.3, 0.5, 1.0, 1.5, 1.99}) {
    CHECK(lens_area(1, d) == doctest::Approx(lens_by_chords(1, d)).epsilon(1e-6));
    CHECK(lens_area(2.5, 2.5 * d) == doctest::Approx(6.25 * lens_area(1, d)));
  }
  CHECK_THROWS_AS(lens_area(0, 1), InvalidInput);
  CHECK_THROWS_AS(lens_area(1, -0.1), InvalidInput);
}

TEST_CASE("lens area is nonincreasing and integrates to the squared disc area") {
  double prev = lens_area(1, 0);
  for (int i = 1; i <= 400; ++i) {
    const double a = lens_area(1, i * 0.005);
    CHECK(a <= prev);
    prev = a;
  }
  for (double R : {1.0, 2.0}) {
    const double total = simpson([R](double s) { return 2 * pi * s * lens_area(R, s); }, 0, 2 * R, 20000);
    CHECK(total == doctest::Approx(std::pow(pi * R * R, 2)).epsilon(1e-3));
  }
}

TEST_CASE("uniform ball sampling") {
  RandomStream rng(9, 1);
  const double R = 2.0, L = 50.0;
  const TorusPoint c{49.5, 0.5};  // straddles the corner
  const int n = 100000;
  double mean = 0.0;
  int inner = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_uniform_ball(c, R, L, rng);
    REQUIRE(p.x >= 0.0);
    REQUIRE(p.x < L);
    REQUIRE(p.y >= 0.0);
    REQUIRE(p.y < L);
    const double r = distance(p, c, L);
    REQUIRE(r <= R);
    mean += r;
    inner += r <= R / 2;
  }
  CHECK(mean / n == doctest::Approx(2 * R / 3).epsilon(0.01));
  CHECK(double(inner) / n == doctest::Approx(0.25).epsilon(0.02));
  CHECK_THROWS_AS(sample_uniform_ball(c, 25.0, L, rng), ConfigError);
}

TEST_CASE("ball coverage is closed and periodic") {
  const double L = 10, R = 1;
  CHECK(ball_covers({3, 3}, R, {3, 3}, L));
  CHECK(ball_covers({3, 3}, R, {4, 3}, L));
  CHECK_FALSE(ball_covers({3, 3}, R, {4.0001, 3}, L));
  CHECK(ball_covers({0, 0}, R, {L - R / 2, 0}, L));
}
