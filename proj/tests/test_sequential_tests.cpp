#include <doctest.h>

#include <cmath>
#include <random>

#include "seqglr/errors.hpp"
#include "seqglr/sequential_tests.hpp"

using namespace seqglr;

TEST_CASE("observations outside the support are rejected") {
  auto t = make_sglr_const(PsiFamily::bernoulli(), 0.1, 0.2, 0.05);
  CHECK_THROWS_AS(t.step(2.0), ObservationOutOfSupport);
  CHECK(t.n() == 0);
  CHECK_THROWS_AS(sprt_oracle_step(t, 1.0), DomainError);
  CHECK_NOTHROW(sglr_const_step(t, 1.0));
}

TEST_CASE("SPRT stops where the closed-form log likelihood ratio crosses") {
  // Gaussian with unit variance: log LR = n (mu_alt xbar - mu_alt^2 / 2).
  const double alpha = 0.05, mu_alt = 0.5, x = 0.4;
  auto t = make_sprt_oracle(PsiFamily::sub_gaussian(1.0), 0.0, mu_alt, alpha);
  int64_t want = 0;
  for (int64_t n = 1; n < 1000 && want == 0; ++n) {
    if (static_cast<double>(n) * (mu_alt * x - mu_alt * mu_alt / 2) >= std::log(1 / alpha)) want = n;
  }
  while (t.status() == Status::Running) sprt_oracle_step(t, x);
  CHECK(t.rejected_at() == want);
}

TEST_CASE("separated SGLR rejects exactly when the GLR-like statistic reaches g") {
  const auto fam = PsiFamily::sub_gaussian(1.0);
  auto t = make_sglr_const(fam, 0.0, 0.2, 0.05);
  const double g = std::get<SglrConstRule>(t.rule()).g;
  CHECK(g == doctest::Approx(solve_g_alpha_constant(0.02, 0.05)));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0.3, 1.0);
  double sum = 0.0;
  for (int64_t n = 1; n <= 5000 && t.status() == Status::Running; ++n) {
    const double x = nd(rng);
    sum += x;
    const bool cross = log_glr_like(fam, static_cast<double>(n), sum / static_cast<double>(n), 0.2, 0.0) >= g;
    sglr_const_step(t, x);
    CHECK((t.status() == Status::Rejected) == cross);
  }
  CHECK(t.status() == Status::Rejected);
}

TEST_CASE("lemma lines for a constant boundary") {
  // Gaussian, mu0 = 0, mu1 = 0.1, g = 10, n_start = 20, eta = 2.
  // Levels g / (20 2^k) = 0.5 / 2^k; d1 = 0.005 clears the level at k = 7.
  const auto fam = PsiFamily::sub_gaussian(1.0);
  const auto lines = lemma_lines(fam, ConstantBoundary{10.0}, 0.0, 0.1, 2.0, 20, 100000);
  REQUIRE(lines.size() == 7);
  for (std::size_t k = 0; k < 7; ++k) {
    CHECK(lines.logw[k] == doctest::Approx(-5.0));
    const double want_z = k == 6 ? 0.1 : std::sqrt(2.0 * 0.5 / std::pow(2.0, static_cast<double>(k + 1)));
    CHECK(lines.z[k] == doctest::Approx(want_z).epsilon(1e-12));
    CHECK(lines.d[k] == doctest::Approx(lines.z[k] * lines.z[k] / 2));
    CHECK(lines.l[k] == doctest::Approx(lines.z[k]));
  }
  // Separation already large enough at n_start: one line with weight e^{-g}.
  const auto one = lemma_lines(fam, ConstantBoundary{10.0}, 0.0, 1.0, 2.0, 20, 100000);
  REQUIRE(one.size() == 1);
  CHECK(one.logw[0] == doctest::Approx(-10.0));
  CHECK_THROWS_AS(lemma_lines(fam, ConstantBoundary{10.0}, 0.0, 0.1, 1.0, 20, 100), DomainError);
}

TEST_CASE("stopping times are ordered: mixture of lines, max of lines, GLR-like") {
  const auto fam = PsiFamily::bernoulli();
  const double mu0 = 0.1, mu1 = 0.12;
  const double g = solve_g_alpha_constant(bregman(fam, mu1, mu0), 0.1);
  const auto lines = lemma_lines(fam, ConstantBoundary{g}, mu0, mu1, 2.0, 1, 20000);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution b(0.13);
    TestState gl(fam, GlrBoundaryRule{mu0, mu1, ConstantBoundary{g}, 1});
    TestState ml(fam, LinesRule{lines, 0.0, false});
    TestState dm(fam, LinesRule{lines, 0.0, true});
    for (int64_t n = 0; n < 20000 && gl.status() == Status::Running; ++n) {
      const double x = b(rng) ? 1.0 : 0.0;
      gl.step(x);
      ml.step(x);
      dm.step(x);
    }
    auto stop = [](const TestState& s) { return s.status() == Status::Rejected ? s.rejected_at() : INT64_MAX; };
    CHECK(stop(dm) <= stop(ml));
    CHECK(stop(ml) <= stop(gl));
  }
}

TEST_CASE("multi-stream calibration") {
  SUBCASE("one stream recovers log(1/alpha)") {
    const auto r = calibrate_multistream(log_inverse_cal(1, 400000, 7), 0.05);
    CHECK(std::abs(r.epsilon - std::log(20.0)) < 0.03);
    CHECK(r.mc_tail <= 0.05);
  }
  SUBCASE("two streams match the exact Gamma(2) tail") {
    const auto r = calibrate_multistream(log_inverse_cal(2, 400000, 8), 0.05);
    const double exact = (1.0 + r.epsilon) * std::exp(-r.epsilon);
    CHECK(std::abs(r.mc_tail - exact) <= 4 * r.mc_se + 1e-3);
    CHECK(r.closed_form_bound >= exact);
  }
  SUBCASE("grid too short") {
    auto cal = log_inverse_cal(1, 20000, 1);
    cal.eps_max = 1.0;
    CHECK_THROWS_AS(calibrate_multistream(cal, 0.05), GridExhausted);
  }
  SUBCASE("h must decrease and diverge") {
    auto cal = log_inverse_cal(1, 20000, 1);
    cal.log_inverse = false;
    cal.h_funcs[0] = [](double u) { return u; };
    CHECK_THROWS_AS(calibrate_multistream(cal, 0.05), DomainError);
    cal.h_funcs[0] = [](double u) { return 1.0 - u; };
    CHECK_THROWS_AS(calibrate_multistream(cal, 0.05), DomainError);
  }
  SUBCASE("too few replications") {
    CHECK_THROWS_AS(calibrate_multistream(log_inverse_cal(2, 100, 1), 0.05), DomainError);
  }
}

TEST_CASE("closed-form multi-stream bound dominates the Gamma tail") {
  for (int K = 1; K <= 5; ++K) {
    for (double eps = K + 0.5; eps < 40.0; eps += 1.5) {
      double partial = 0.0, term = 1.0;
      for (int j = 0; j < K; ++j) {
        partial += term;
        term *= eps / (j + 1);
      }
      CHECK(multistream_tail_bound(K, eps) >= std::exp(-eps) * partial);
    }
  }
  CHECK(multistream_tail_bound(3, 2.0) == 1.0);
}
