#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "seqglr/kernels.hpp"

namespace k = seqglr::kernels;

namespace {

struct RandomLines {
  std::vector<double> logw, d, l, z;
};

RandomLines random_lines(std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomLines r;
  for (std::size_t i = 0; i < count; ++i) {
    r.z.push_back(0.01 + u(rng));
    r.d.push_back(0.5 * r.z.back() * r.z.back());
    r.l.push_back(r.z.back());
    r.logw.push_back(-30.0 * u(rng));
  }
  return r;
}

}  // namespace

TEST_CASE("scalar table is always present") {
  CHECK(k::scalar_table().isa == k::Isa::Scalar);
  CHECK(k::scalar_table().integer_min_scan != nullptr);
  CHECK(k::avx2_available() == (k::avx2_table() != nullptr));
}

TEST_CASE("AVX2 integer scan matches the scalar reference") {
  if (!k::avx2_available()) {
    MESSAGE("AVX2 not available, skipping");
    return;
  }
  const auto& s = k::scalar_table();
  const auto& v = *k::avx2_table();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double g = 0.5 + 40.0 * u(rng);
    const double log_r = -25.0 * u(rng);
    const int64_t lo = 1 + static_cast<int64_t>(5 * u(rng));
    const int64_t hi = lo + static_cast<int64_t>(5000 * u(rng));
    const int patience = i % 2 == 0 ? 0 : 50;
    const auto a = s.integer_min_scan(g, log_r, lo, hi, patience);
    const auto b = v.integer_min_scan(g, log_r, lo, hi, patience);
    CAPTURE(g);
    CAPTURE(log_r);
    CHECK(a.k == b.k);
    CHECK(b.log_value == doctest::Approx(a.log_value).epsilon(1e-13));
  }
}

TEST_CASE("AVX2 line reductions match the scalar reference") {
  if (!k::avx2_available()) {
    MESSAGE("AVX2 not available, skipping");
    return;
  }
  const auto& s = k::scalar_table();
  const auto& v = *k::avx2_table();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Sizes around the vector width exercise the tail handling.
  for (std::size_t count : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 200u}) {
    const auto r = random_lines(rng, count);
    for (int rep = 0; rep < 20; ++rep) {
      const double n = 1.0 + 1e5 * u(rng);
      const double xbar = -0.2 + 1.5 * u(rng);
      const double a = s.mixture_log_sum(r.logw.data(), r.d.data(), r.l.data(), r.z.data(), count, n, xbar);
      const double b = v.mixture_log_sum(r.logw.data(), r.d.data(), r.l.data(), r.z.data(), count, n, xbar);
      CHECK(b == doctest::Approx(a).epsilon(1e-12));
      const double c = s.lines_log_max(r.logw.data(), r.d.data(), r.l.data(), r.z.data(), count, n, xbar);
      const double e = v.lines_log_max(r.logw.data(), r.d.data(), r.l.data(), r.z.data(), count, n, xbar);
      CHECK(e == doctest::Approx(c).epsilon(1e-14));
    }
  }
}

TEST_CASE("log-sum-exp kernel agrees with a direct long double sum") {
  std::mt19937_64 rng(9);
  const auto r = random_lines(rng, 13);
  const double n = 40.0, xbar = 0.3;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < 13; ++i) {
    acc += std::exp(static_cast<long double>(r.logw[i] + n * (r.d[i] + r.l[i] * (xbar - r.z[i]))));
  }
  const double got =
      k::scalar_table().mixture_log_sum(r.logw.data(), r.d.data(), r.l.data(), r.z.data(), 13, n, xbar);
  CHECK(got == doctest::Approx(static_cast<double>(std::log(acc))).epsilon(1e-13));
}

TEST_CASE("active table can be pinned") {
  const auto before = k::active().isa;
  k::set_active(k::Isa::Scalar);
  CHECK(k::active().isa == k::Isa::Scalar);
  if (k::avx2_available()) {
    k::set_active(k::Isa::Avx2);
    CHECK(k::active().isa == k::Isa::Avx2);
  }
  k::set_active(before);
}
