#include <doctest.h>

#include <stdexcept>

#include "seqglr/errors.hpp"
#include "seqglr/harness.hpp"

using namespace seqglr;
namespace h = seqglr::harness;

TEST_CASE("config parsing") {
  const auto cfg = h::parse_config("# comment\nalpha = 0.05\n\nmu_grid=0, 0.05 ,0.1  # trailing\nk = 3\n");
  CHECK(h::get_double(cfg, "alpha", 0.0) == 0.05);
  CHECK(h::get_int(cfg, "k", 0) == 3);
  CHECK(h::get_double(cfg, "missing", 7.0) == 7.0);
  const auto v = h::get_list(cfg, "mu_grid", {});
  REQUIRE(v.size() == 3);
  CHECK(v[1] == 0.05);
  CHECK_NOTHROW(h::check_keys(cfg, {"alpha", "mu_grid", "k"}));
  CHECK_THROWS_AS(h::check_keys(cfg, {"alpha"}), ConfigError);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(h::parse_config("alpha = 1\nalpha = 2\n"), ConfigError);
  CHECK_THROWS_AS(h::parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS(h::parse_config("Alpha = 1\n"), ConfigError);
  const auto bad = h::parse_config("alpha = 0.1x\nk = 2.5\n");
  CHECK_THROWS_AS(h::get_double(bad, "alpha", 0.0), ConfigError);
  CHECK_THROWS_AS(h::get_int(bad, "k", 0), ConfigError);
  CHECK_THROWS_AS(h::load_config("/nonexistent/seqglr.cfg"), ConfigError);
}

TEST_CASE("number formatting ignores the locale and drops negative zero") {
  CHECK(h::fmt(0.5, 3) == "0.500");
  CHECK(h::fmt(-0.0001, 2) == "0.00");
  CHECK(h::fmt(1234.5678, 1) == "1234.6");
  CHECK(h::fmt_sci(12345.0, 2) == "1.23e+04");
}

TEST_CASE("csv layout") {
  const h::Table t{"demo", {"a", "b"}, {{"1", "x"}, {"2", "y"}}};
  CHECK(h::to_csv(t) == "# seqglr demo v1\na,b\n1,x\n2,y\n");
}

TEST_CASE("parallel_map keeps index order and propagates errors") {
  for (int threads : {1, 2, 5}) {
    const auto v = h::parallel_map<int64_t>(1000, threads, [](int64_t i) { return i * i; });
    REQUIRE(v.size() == 1000);
    bool ok = true;
    for (int64_t i = 0; i < 1000; ++i) ok = ok && v[static_cast<std::size_t>(i)] == i * i;
    CHECK(ok);
    CHECK_THROWS_AS(h::parallel_map<int>(100, threads,
                                         [](int64_t i) -> int {
                                           if (i == 37) throw std::runtime_error("boom");
                                           return 0;
                                         }),
                    std::runtime_error);
  }
  CHECK(h::parallel_map<int>(0, 4, [](int64_t) { return 1; }).empty());
}

TEST_CASE("simulation output does not depend on the thread count") {
  auto spec = h::appd_defaults(true);
  spec.reps = 60;
  spec.mus = {0.1, 0.13};
  const auto a = h::to_csv(h::run_appd(spec, {99, 1}).table("appd-bernoulli"));
  const auto b = h::to_csv(h::run_appd(spec, {99, 4}).table("appd-bernoulli"));
  CHECK(a == b);
  const auto c = h::to_csv(h::run_appd(spec, {100, 4}).table("appd-bernoulli"));
  CHECK(a != c);
}

TEST_CASE("appd rows stay in range") {
  auto spec = h::appd_defaults(false);
  spec.reps = 100;
  const auto res = h::run_appd(spec, {1, 0});
  CHECK(res.design.n_star == 657);
  CHECK(res.horizon == 1314);
  for (const auto& r : res.rows) {
    CHECK(r.reject_rate >= 0.0);
    CHECK(r.reject_rate <= 1.0);
    CHECK(r.mean_n >= 1.0);
    CHECK(r.mean_n <= 1314.0);
  }
  REQUIRE(res.find(0.1, "fixed") != nullptr);
  CHECK(res.find(0.1, "fixed")->mean_n == 657.0);
  CHECK(res.find(0.0, "sprt-oracle") == nullptr);
}

TEST_CASE("curve scenarios pass their built-in checks") {
  for (const auto& c : h::run_fig3({}).checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.pass);
  }
  for (const auto& c : h::run_fig5({}).checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("invalid scenario settings") {
  auto spec = h::appd_defaults(false);
  spec.mu1 = -1.0;
  CHECK_THROWS_AS(h::run_appd(spec, {}), Error);
  spec = h::appd_defaults(false);
  spec.n_star = -3;
  CHECK_THROWS_AS(h::run_appd(spec, {}), ConfigError);
}
