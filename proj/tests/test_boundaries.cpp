#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "seqglr/boundaries.hpp"
#include "seqglr/errors.hpp"

using namespace seqglr;

namespace {

// Exhaustive oracle over every integer k up to k_max.
IntegerMin brute_integer_min(double g, double ratio, int64_t k_max = 200000) {
  IntegerMin best{INFINITY, 0};
  for (int64_t k = 1; k <= k_max; ++k) {
    const double v = static_cast<double>(k) * std::exp(-g * std::pow(ratio, 1.0 / static_cast<double>(k)));
    if (v < best.value) best = {v, k};
  }
  return best;
}

}  // namespace

TEST_CASE("integer minimisation agrees with an exhaustive scan") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double g = 1.0 + 30.0 * u(rng);
    const double ratio = std::pow(10.0, -9.0 * u(rng));
    const auto want = brute_integer_min(g, ratio);
    const auto got = integer_min(g, ratio);
    CAPTURE(g);
    CAPTURE(ratio);
    CHECK(got.value == doctest::Approx(want.value).epsilon(1e-12));
    CHECK(got.k == want.k);
    CHECK(integer_min(g, ratio, true).k == want.k);
  }
}

TEST_CASE("constant-boundary crossing bound") {
  CHECK(crossing_bound_constant(3.0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS_AS(crossing_bound_constant(0.0, 5.0), Degenerate);
  CHECK_THROWS_AS(crossing_bound_constant(0.1, -1.0), DomainError);
  // Never above the Lorden bound for the same level.
  for (double d1 : {1e-2, 1e-4, 1e-6}) {
    for (double g : {5.0, 10.0, 20.0}) CHECK(crossing_bound_constant(d1, g) <= lorden_bound(d1, g));
  }
}

TEST_CASE("solver round trips and grows slowly as the separation shrinks") {
  double prev = 0.0;
  for (double d1 : {1e-1, 1e-3, 1e-5, 1e-7, 1e-9}) {
    const double g = solve_g_alpha_constant(d1, 0.05);
    const double b = crossing_bound_constant(d1, g);
    CHECK(b <= 0.05);
    CHECK(b >= 0.05 - 1e-6);
    CHECK(g > prev);
    prev = g;
  }
  // Eight decades of separation cost only a few nats.
  CHECK(solve_g_alpha_constant(1e-9, 0.05) - solve_g_alpha_constant(1e-1, 0.05) < 4.0);
  CHECK(g_alpha_constant_upper(1e-4, 0.05) >= solve_g_alpha_constant(1e-4, 0.05));
}

TEST_CASE("Lorden level solves (1 + g/d1) e^{-g} = alpha") {
  for (double d1 : {1e-2, 1e-5}) {
    const double g = solve_g_alpha_lorden(d1, 0.025);
    CHECK((1.0 + g / d1) * std::exp(-g) == doctest::Approx(0.025).epsilon(1e-6));
  }
  CHECK(solve_g_alpha_lorden(10.0, 0.05) == doctest::Approx(std::log(20.0)));
}

TEST_CASE("log-log boundary and its stitched sum") {
  const double c = 2.0, a = 0.05;
  CHECK(loglog_boundary(c, a, 8.0) == doctest::Approx(c * (std::log(1 / a) + 2 * std::log(std::log(16.0) / std::log(2.0)))));
  // With eta = c the k-th term is alpha / (k + 1)^2.
  const double s = stitched_sum(LogLogBoundary{c, a}, 0.0, c);
  CHECK(s == doctest::Approx(a * (std::numbers::pi * std::numbers::pi / 6 - 1)).epsilon(1e-8));
  CHECK(s <= a);
}

TEST_CASE("k_eta is the first epoch where the line clears the boundary") {
  const Boundary b = ConstantBoundary{10.0};
  for (double d1 : {0.5, 0.01, 1e-4}) {
    const auto k = k_eta(b, d1, 2.0);
    REQUIRE(k.has_value());
    CHECK(d1 >= 10.0 / std::pow(2.0, static_cast<double>(*k)));
    if (*k > 0) CHECK(d1 < 10.0 / std::pow(2.0, static_cast<double>(*k - 1)));
  }
  CHECK_FALSE(k_eta(b, 0.0, 2.0).has_value());
}

TEST_CASE("shape validation rejects decreasing boundaries") {
  CHECK_NOTHROW(validate_shape(ConstantBoundary{3.0}));
  CHECK_NOTHROW(validate_shape(LogLogBoundary{2.0, 0.1}));
  CHECK_THROWS_AS(validate_shape(PiecewiseConstantBoundary{{1.0, 10.0}, {5.0, 3.0}}), DomainError);
  CHECK(evaluate(PiecewiseConstantBoundary{{1.0, 10.0}, {3.0, 5.0}}, 12.0) == 5.0);
}

TEST_CASE("general crossing bound matches the constant special case") {
  const auto gb = crossing_bound_general(ConstantBoundary{12.0}, 1e-3);
  CHECK(gb.value == doctest::Approx(crossing_bound_constant(1e-3, 12.0)));
  const auto ll = crossing_bound_general(LogLogBoundary{2.0, 0.05}, 0.0, StitchParams{2.0});
  CHECK(ll.value <= 0.05);
}

TEST_CASE("high-probability time is the first integer meeting its inequality") {
  const auto f = PsiFamily::sub_gaussian(1.0);
  const double c = 2.0, delta = 0.05;
  const auto th = t_high(f, 0.5, 0.0, c, delta);
  auto holds = [&](double t) {
    return c * (std::log(1 / delta) + 2 * std::log(std::log(c * t) / std::log(c))) / th.dstar <= t;
  };
  CHECK(holds(static_cast<double>(th.t)));
  CHECK_FALSE(holds(static_cast<double>(th.t - 1)));
  CHECK(th.closed_form >= static_cast<double>(th.t));
  CHECK_THROWS_AS(t_high(f, 0.0, 0.0, c, delta), InvalidHypotheses);
  CHECK_THROWS_AS(t_high(f, 0.5, 0.0, c, 0.0), DomainError);
}

TEST_CASE("expected sample size bounds shrink as the mean moves away") {
  const auto f = PsiFamily::sub_gaussian(1.0);
  CHECK(expected_n_bound_const(f, 0.3, 0.0, 0.1, 0.05) < expected_n_bound_const(f, 0.15, 0.0, 0.1, 0.05));
  CHECK(expected_n_bound_noseq(f, 0.3, 0.0, 2.0, 0.05) < expected_n_bound_noseq(f, 0.15, 0.0, 2.0, 0.05));
}
