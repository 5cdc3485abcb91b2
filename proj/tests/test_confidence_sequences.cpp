#include <doctest.h>

#include <cmath>
#include <random>

#include "seqglr/confidence_sequences.hpp"
#include "seqglr/distributions.hpp"
#include "seqglr/errors.hpp"

using namespace seqglr;

namespace {

double brute_interval_bound(double g, int64_t n_min, int64_t n_max, bool head) {
  const double ratio = static_cast<double>(n_min) / static_cast<double>(n_max);
  double best = INFINITY;
  for (int k = 1; k <= 200000; ++k) {
    best = std::min(best, k * std::exp(-g * std::pow(ratio, 1.0 / k)));
  }
  return (head ? std::exp(-g) : 0.0) + best;
}

// Gaussian GLR-like lower bound written out regime by regime.
double gaussian_lower(double sigma, double g, int64_t a, int64_t b, int64_t n, double xbar) {
  const double nd = static_cast<double>(n);
  auto gap = [&](double m) { return sigma * std::sqrt(2 * g / m); };
  if (n >= a && n <= b) return xbar - gap(nd);
  const double m = n < a ? static_cast<double>(a) : static_cast<double>(b);
  const double slope = gap(m) / (sigma * sigma);
  return xbar - gap(m) - (g / nd - g / m) / slope;
}

}  // namespace

TEST_CASE("interval bound against a brute-force minimum") {
  for (double g : {3.0, 8.0, 15.0}) {
    for (auto [lo, hi] : {std::pair<int64_t, int64_t>{1, 100000}, {66, 1314}, {5000, 400000}, {10, 10}}) {
      for (bool head : {false, true}) {
        CHECK(interval_bound(g, lo, hi, head).value ==
              doctest::Approx(brute_interval_bound(g, lo, hi, head)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("interval level round trips and grows like log log of the width") {
  const auto s = solve_g_alpha_interval(0.025, 1, 100000, false);
  CHECK(s.bound <= 0.025);
  CHECK(interval_bound(s.g * (1 - 1e-7), 1, 100000, false).value > 0.025);
  const double g_narrow = solve_g_alpha_interval(0.025, 1000, 10000, false).g;
  const double g_wide = solve_g_alpha_interval(0.025, 1, 10000000, false).g;
  CHECK(g_narrow < s.g);
  CHECK(s.g < g_wide);
  CHECK(g_wide - s.g < 1.5);
  // A single-point window is a fixed-sample Chernoff bound.
  CHECK(solve_g_alpha_interval(0.025, 50, 50, false).g == doctest::Approx(std::log(40.0)).epsilon(1e-9));
}

TEST_CASE("n0 and n0_strict by direct search") {
  const auto fam = PsiFamily::bernoulli();
  for (double mu0 : {0.3, 0.9, 0.99}) {
    for (double g : {2.0, 7.5, std::log(1 / 0.3) * 4}) {
      const double sup = fam.sup_divergence_upper(mu0);
      int64_t a = 1, b = 1;
      while (a * sup < g) ++a;
      while (!(b * sup > g)) ++b;
      CHECK(n0(fam, mu0, g) == a);
      CHECK(n0_strict(fam, mu0, g) == b);
    }
  }
  CHECK(n0(PsiFamily::sub_gaussian(1.0), 0.0, 10.0) == 1);
}

TEST_CASE("Gaussian GLR-like lower bound follows the three regimes") {
  const double sigma = 1.5, alpha = 0.05;
  const auto cfg = make_cs(PsiFamily::sub_gaussian(sigma), alpha, 20, 2000);
  const auto& iv = cfg.intervals.front();
  for (int64_t n : {1, 5, 19, 20, 21, 500, 2000, 2001, 50000}) {
    const double xbar = 0.37;
    const auto r = ci_lower(cfg, n, xbar);
    CHECK(r.method == CiMethod::ClosedForm);
    const double want = iv.head ? gaussian_lower(sigma, iv.g, 20, 2000, n, xbar)
                                : (n < 20 ? -INFINITY : gaussian_lower(sigma, iv.g, 20, 2000, n, xbar));
    CAPTURE(n);
    CHECK(r.lower == doctest::Approx(want).epsilon(1e-12));
    // Membership flips at the closed-form endpoint.
    if (std::isfinite(r.lower)) {
      CHECK(cs_contains(cfg, n, xbar, r.lower + 1e-9));
      CHECK_FALSE(cs_contains(cfg, n, xbar, r.lower - 1e-9));
    }
  }
}

TEST_CASE("radius after the window never drops below half the last in-window radius") {
  const double sigma = 1.0;
  const auto cfg = make_cs(PsiFamily::sub_gaussian(sigma), 0.05, 10, 1000);
  const double g = cfg.intervals.front().g;
  const double floor = sigma * std::sqrt(2 * g / 1000.0) / 2;
  double prev = INFINITY;
  for (int64_t n = 1000; n <= 10000000; n *= 10) {
    const double radius = -ci_lower(cfg, n, 0.0).lower;
    CHECK(radius >= floor);
    CHECK(radius <= prev);
    prev = radius;
  }
  CHECK(prev == doctest::Approx(floor).epsilon(1e-3));
}

TEST_CASE("mixture starts at the interval bound") {
  const auto fam = PsiFamily::bernoulli();
  const auto cfg = make_cs(fam, 0.05, 30, 3000);
  const auto& iv = cfg.intervals.front();
  const auto grid = mixture_grid(fam, iv, 0.4);
  const double m0 = mixture_statistic(grid, 0, 0.4);
  CHECK(m0 == doctest::Approx(interval_bound(grid.g, 30, 3000, grid.head).value).epsilon(1e-12));
  CHECK(m0 <= 0.05 * (1 + 1e-12));
  // With x̄ = mu0 every line has value d - l z <= 0, so M_n never exceeds M_0.
  for (int64_t n : {1, 10, 1000}) CHECK(mixture_statistic(grid, n, 0.4) <= m0 * (1 + 1e-12));
}

TEST_CASE("lower bound never exceeds the running mean") {
  for (const auto& fam : {PsiFamily::sub_gaussian(1.0), PsiFamily::bernoulli(), PsiFamily::poisson()}) {
    for (CsMode mode : {CsMode::GlrLike, CsMode::DiscreteMixture}) {
      const auto cfg = make_cs(fam, 0.05, 10, 1000, mode);
      for (int64_t n : {3, 10, 200, 5000}) {
        for (double xbar : {0.05, 0.3, 0.8}) {
          CHECK(ci_lower(cfg, n, xbar).lower <= xbar);
        }
      }
    }
  }
}

TEST_CASE("Bernoulli bisection endpoints separate members from non-members") {
  const auto cfg = make_cs(PsiFamily::bernoulli(), 0.05, 10, 1000);
  for (int64_t n : {10, 50, 400, 1000}) {
    for (double xbar : {0.2, 0.5, 0.7}) {
      const auto r = ci_lower(cfg, n, xbar);
      if (r.method != CiMethod::BinarySearch || !(r.lower > 1e-6)) continue;
      CHECK(cs_contains(cfg, n, xbar, r.lower + 1e-7));
      CHECK_FALSE(cs_contains(cfg, n, xbar, r.lower - 1e-7));
    }
  }
}

TEST_CASE("upper bounds come from reflection") {
  const auto g = make_cs(PsiFamily::sub_gaussian(1.0), 0.05, 10, 1000);
  CHECK(ci_upper(g, 100, 0.2).lower == doctest::Approx(0.2 + (0.2 - ci_lower(g, 100, 0.2).lower)));
  const auto b = make_cs(PsiFamily::bernoulli(), 0.05, 10, 1000);
  CHECK(ci_upper(b, 100, 0.3).lower == doctest::Approx(1.0 - ci_lower(b, 100, 0.7).lower));
  CHECK_THROWS_AS(ci_upper(make_cs(PsiFamily::poisson(), 0.05, 10, 1000), 100, 1.0), Unsupported);
}

TEST_CASE("multiple intervals split alpha and must not overlap") {
  const auto fam = PsiFamily::sub_gaussian(1.0);
  const auto cfg = multi_interval_cs(fam, 0.05, {{10, 100}, {100, 10000}});
  REQUIRE(cfg.intervals.size() == 2);
  for (const auto& iv : cfg.intervals) {
    CHECK(iv.g == doctest::Approx(solve_g_alpha_interval(0.025, iv.n_min, iv.n_max, iv.head).g));
  }
  CHECK_THROWS_AS(multi_interval_cs(fam, 0.05, {{10, 200}, {100, 1000}}), OverlapError);
  CHECK_THROWS_AS(multi_interval_cs(fam, 0.05, {{10, 100}}, {1.0, 2.0}), DomainError);
}

TEST_CASE("baseline radii at the plotting settings") {
  const double alpha = 0.025, n = 1260.0, rho = 1260.0;
  const double st = 1.7 / std::sqrt(n) * std::sqrt(std::log(std::log(2 * n)) + 0.72 * std::log(5.2 / alpha));
  const double nm = std::sqrt(2 * (1 / n + rho / (n * n)) * std::log(1 / (2 * alpha) * std::sqrt((n + rho) / rho + 1)));
  CHECK(baseline_radius(CsMode::Stitching, alpha, 1260, 1.0) == doctest::Approx(st).epsilon(1e-14));
  CHECK(baseline_radius(CsMode::NormalMixture, alpha, 1260, 2.0, rho) == doctest::Approx(2 * nm).epsilon(1e-14));
  const auto cfg = baseline_cs(CsMode::Stitching, alpha, 1.0);
  CHECK(ci_lower(cfg, 1260, 0.5).lower == doctest::Approx(0.5 - st));
  CHECK_THROWS_AS(baseline_radius(CsMode::GlrLike, alpha, 10, 1.0), DomainError);
}

TEST_CASE("GLR-like rejection implies discrete-mixture rejection along random paths") {
  const auto fam = PsiFamily::bernoulli();
  const auto cfg = make_cs(fam, 0.05, 10, 1000);
  std::mt19937_64 rng(17);
  std::bernoulli_distribution draw(0.3);
  int64_t glr_count = 0;
  for (double mu0 : {0.05, 0.15, 0.22, 0.27, 0.29}) {
    const NullGeometry geo(cfg, mu0);
    double sum = 0.0;
    for (int64_t n = 1; n <= 2000; ++n) {
      sum += draw(rng) ? 1.0 : 0.0;
      const double xbar = sum / static_cast<double>(n);
      if (geo.glr_rejects(n, xbar)) {
        ++glr_count;
        CHECK(geo.mixture_rejects(n, xbar));
      }
    }
  }
  CHECK(glr_count > 0);
}

TEST_CASE("input validation") {
  const auto cfg = make_cs(PsiFamily::sub_gaussian(1.0), 0.05, 10, 1000);
  CHECK_THROWS_AS(ci_lower(cfg, 0, 0.0), DomainError);
  CHECK_THROWS_AS(make_cs(PsiFamily::sub_gaussian(1.0), 0.05, 100, 10), DomainError);
  CHECK_THROWS_AS(make_cs(PsiFamily::sub_gaussian(1.0), 0.05, 10, 100, CsMode::Stitching), DomainError);
  CHECK_THROWS_AS(NullGeometry(baseline_cs(CsMode::Stitching, 0.05, 1.0), 0.0), DomainError);
}
