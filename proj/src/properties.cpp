#include "seqglr/properties.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "seqglr/boundaries.hpp"
#include "seqglr/confidence_sequences.hpp"
#include "seqglr/distributions.hpp"
#include "seqglr/errors.hpp"
#include "seqglr/rng.hpp"
#include "seqglr/sequential_tests.hpp"

namespace seqglr::properties {

namespace {

using harness::fmt;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Scenario tags for replication_rng; distinct from the harness tags.
constexpr uint64_t kTagSolver = 101;
constexpr uint64_t kTagType1 = 105;
constexpr uint64_t kTagContainment = 107;
constexpr uint64_t kTagOrder = 108;
constexpr uint64_t kTagHighProb = 111;

std::string join_failures(const std::vector<std::string>& fails, std::size_t keep = 6) {
  std::string out;
  for (std::size_t i = 0; i < fails.size() && i < keep; ++i) {
    if (i > 0) out += "; ";
    out += fails[i];
  }
  if (fails.size() > keep) out += "; ... (" + std::to_string(fails.size()) + " total)";
  return out;
}

Check all_of(const std::string& name, const std::vector<Check>& checks) {
  std::vector<std::string> fails;
  for (const auto& c : checks) {
    if (!c.pass) fails.push_back(c.name + ": " + c.detail);
  }
  return {name, fails.empty(),
          fails.empty() ? std::to_string(checks.size()) + " sub-checks passed" : join_failures(fails)};
}

// A stream sampler for one family at a given true mean.
using Sampler = std::function<double(std::mt19937_64&)>;

Sampler sampler_for(const PsiFamily& fam, double mu) {
  switch (fam.kind()) {
    case FamilyKind::SubGaussian:
      return [mu, s = fam.scale()](std::mt19937_64& rng) {
        return std::normal_distribution<double>(mu, s)(rng);
      };
    case FamilyKind::SubExponential:
      return [mu, b = fam.scale()](std::mt19937_64& rng) {
        return mu + b * (std::exponential_distribution<double>(1.0)(rng) - 1.0);
      };
    case FamilyKind::Bernoulli:
      return [mu](std::mt19937_64& rng) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < mu ? 1.0 : 0.0;
      };
    case FamilyKind::Poisson:
      return [mu](std::mt19937_64& rng) {
        return static_cast<double>(std::poisson_distribution<int64_t>(mu)(rng));
      };
    default:
      throw Unsupported("no sampler for custom families");
  }
}

}  // namespace

// ------------------------------------------------------- reference tables

const std::vector<ReferenceRow>& gaussian_reference() {
  static const std::vector<ReferenceRow> rows = {
      {-0.05, 0.42, 0.00, 0.02, 0.00, 1312.80, 1284.72, kNaN, 0.00, 0.02, kNaN},
      {0.00, 0.66, 0.00, 0.10, 0.10, 1310.93, 1201.76, kNaN, 0.00, 0.09, kNaN},
      {0.05, 0.94, 0.11, 0.40, 0.52, 1251.36, 958.40, kNaN, 0.04, 0.30, kNaN},
      {0.10, 1.00, 0.66, 0.89, 0.90, 926.14, 509.28, 449.33, 0.28, 0.68, 0.78},
      {0.15, 1.00, 0.99, 1.00, 1.00, 488.84, 222.06, 209.88, 0.75, 0.95, 0.97},
      {0.20, 1.00, 1.00, 1.00, 1.00, 280.21, 127.01, 120.11, 0.97, 1.00, 1.00},
  };
  return rows;
}

const std::vector<ReferenceRow>& bernoulli_reference() {
  static const std::vector<ReferenceRow> rows = {
      {0.09, 0.34, 0.00, 0.02, 0.00, 3290.00, 3234.39, kNaN, 0.00, 0.02, kNaN},
      {0.10, 0.59, 0.00, 0.08, 0.09, 3278.18, 3069.49, kNaN, 0.00, 0.07, kNaN},
      {0.11, 0.93, 0.12, 0.41, 0.51, 3128.98, 2354.69, kNaN, 0.04, 0.31, kNaN},
      {0.12, 1.00, 0.69, 0.90, 0.90, 2259.14, 1203.76, 1060.18, 0.30, 0.71, 0.81},
      {0.13, 1.00, 0.99, 1.00, 1.00, 1235.90, 558.26, 523.05, 0.73, 0.95, 0.96},
      {0.14, 1.00, 1.00, 1.00, 1.00, 701.95, 308.51, 292.87, 0.97, 1.00, 1.00},
  };
  return rows;
}

Check compare_with_reference(const std::string& name, const harness::AppdResult& res,
                             const std::vector<ReferenceRow>& ref, int64_t ref_n_star) {
  std::vector<std::string> fails;
  int cells = 0;
  double worst_rate = 0.0, worst_size = 0.0, worst_early = 0.0;
  auto row = [&](double mu, const char* method) -> const harness::MethodRow* {
    const auto* r = res.find(mu, method);
    if (r == nullptr) fails.push_back(std::string("missing ") + method + " at mu=" + fmt(mu, 2));
    return r;
  };
  auto rate = [&](double mu, const char* method, double want, double tol) {
    if (std::isnan(want)) return;
    if (const auto* r = row(mu, method)) {
      ++cells;
      const double d = std::abs(r->reject_rate - want);
      worst_rate = std::max(worst_rate, d);
      if (d > tol) fails.push_back(std::string(method) + " reject at mu=" + fmt(mu, 2) + ": " +
                                   fmt(r->reject_rate, 4) + " vs " + fmt(want, 2));
    }
  };
  auto size = [&](double mu, const char* method, double want) {
    if (std::isnan(want)) return;
    if (const auto* r = row(mu, method)) {
      ++cells;
      const double d = std::abs(r->mean_n - want) / want;
      worst_size = std::max(worst_size, d);
      if (d > kMeanSizeRelTol) fails.push_back(std::string(method) + " mean n at mu=" + fmt(mu, 2) +
                                               ": " + fmt(r->mean_n, 2) + " vs " + fmt(want, 2));
    }
  };
  auto early = [&](double mu, const char* method, double want) {
    if (std::isnan(want)) return;
    if (const auto* r = row(mu, method)) {
      ++cells;
      const double d = std::abs(r->early_stop - want);
      worst_early = std::max(worst_early, d);
      if (d > kEarlyStopTol) fails.push_back(std::string(method) + " early stop at mu=" + fmt(mu, 2) +
                                             ": " + fmt(r->early_stop, 4) + " vs " + fmt(want, 2));
    }
  };
  for (const auto& r : ref) {
    rate(r.mu, "p-hacking", r.reject_phack, kPhackTol);
    rate(r.mu, "sglr", r.reject_sglr, kRejectTol);
    rate(r.mu, "sglr-dm", r.reject_dm, kRejectTol);
    rate(r.mu, "fixed", r.reject_fixed, kRejectTol);
    size(r.mu, "sglr", r.n_sglr);
    size(r.mu, "sglr-dm", r.n_dm);
    size(r.mu, "sprt-oracle", r.n_sprt);
    size(r.mu, "fixed", static_cast<double>(ref_n_star));
    early(r.mu, "sglr", r.early_sglr);
    early(r.mu, "sglr-dm", r.early_dm);
    early(r.mu, "sprt-oracle", r.early_sprt);
  }
  std::string detail = "n*=" + std::to_string(res.design.n_star) + ", " + std::to_string(cells) +
                       " cells; max |rate diff| " + fmt(worst_rate, 4) + ", max rel size diff " +
                       fmt(worst_size, 4) + ", max |early diff| " + fmt(worst_early, 4);
  if (!fails.empty()) detail += "; " + join_failures(fails);
  return {name, fails.empty(), detail};
}

// ------------------------------------------------------------- criteria

Check boundary_solver_fidelity(const SuiteOptions& opt) {
  auto rng = replication_rng(opt.seed, kTagSolver, 0, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  double worst_trip = 0.0;
  std::vector<std::string> fails;
  for (int i = 0; i < 100; ++i) {
    const double d1 = std::pow(10.0, -8.0 + 8.5 * u(rng));
    const double g = 0.5 + 40.0 * u(rng);
    // Exhaustive scan over every integer k in long double.
    long double oracle;
    if (d1 >= g) {
      oracle = std::exp(-static_cast<long double>(g));
    } else {
      const long double r = static_cast<long double>(d1) / g;
      long double best = std::numeric_limits<long double>::infinity();
      for (int64_t k = 1; k <= 1000000; ++k) {
        const long double kk = static_cast<long double>(k);
        best = std::min(best, kk * std::exp(-static_cast<long double>(g) * std::pow(r, 1.0L / kk)));
      }
      oracle = std::min(1.0L, best);
    }
    const double got = crossing_bound_constant(d1, g);
    const double err = static_cast<double>(std::abs(static_cast<long double>(got) - oracle) / oracle);
    worst = std::max(worst, err);
    if (err > 1e-10) fails.push_back("d1=" + std::to_string(d1) + " g=" + std::to_string(g));

    const double alpha = 0.005 + 0.3 * u(rng);
    const double gs = solve_g_alpha_constant(d1, alpha);
    const double b = crossing_bound_constant(d1, gs);
    worst_trip = std::max(worst_trip, std::abs(b - alpha));
    if (!(b <= alpha && b >= alpha - 1e-6)) {
      fails.push_back("round trip d1=" + std::to_string(d1) + " alpha=" + std::to_string(alpha));
    }
  }
  return {"1 boundary solver fidelity", fails.empty(),
          "100 pairs; max rel error " + fmt(worst, 14) + ", max |bound - alpha| " + fmt(worst_trip, 10) +
              (fails.empty() ? "" : "; " + join_failures(fails))};
}

Check boundary_growth_curve() {
  const auto res = harness::run_fig3(harness::Fig3Spec{});
  return all_of("2 boundary growth curve", res.checks);
}

Check appd_gaussian_tables(const SuiteOptions& opt) {
  auto spec = harness::appd_defaults(false);
  spec.reps = opt.reps;
  const auto res = harness::run_appd(spec, {opt.seed, opt.threads});
  auto c = compare_with_reference("3 Gaussian testing tables", res, gaussian_reference(),
                                  kGaussianReferenceNStar);
  if (res.design.n_star != kGaussianReferenceNStar) {
    c.pass = false;
    c.detail += "; n* differs from 657";
  }
  return c;
}

Check appd_bernoulli_tables(const SuiteOptions& opt) {
  auto spec = harness::appd_defaults(true);
  spec.reps = opt.reps;
  const auto res = harness::run_appd(spec, {opt.seed, opt.threads});
  return compare_with_reference("4 Bernoulli testing tables", res, bernoulli_reference(),
                                kBernoulliReferenceNStar);
}

namespace {

struct NullCase {
  std::string label;
  PsiFamily fam;
  double mu0;
  double mu1;
  int64_t n_star;
  bool has_fixed;
};

enum Type1Test { kT1Glr = 0, kT1Dm, kT1Const, kT1NoSep, kT1Sprt, kT1Fixed, kT1Count };
const char* const kT1Names[kT1Count] = {"sglr", "sglr-dm", "sglr-const", "sglr-noseq", "sprt",
                                        "fixed"};

}  // namespace

Check type1_validity(const SuiteOptions& opt) {
  constexpr double alpha = 0.1;
  constexpr double beta = 0.1;
  const auto gauss = PsiFamily::sub_gaussian(1.0);
  const auto bern = PsiFamily::bernoulli();
  std::vector<NullCase> cases = {
      {"gaussian", gauss, 0.0, 0.1, design_test_from_power(gauss, alpha, beta, 0.0, 0.1).n_star, true},
      {"bernoulli", bern, 0.1, 0.12, design_test_from_power(bern, alpha, beta, 0.1, 0.12).n_star, true},
      {"sub-exponential", PsiFamily::sub_exponential(1.0), 0.0, 0.1, 1000, false},
      {"poisson", PsiFamily::poisson(), 2.0, 2.2, 1000, false},
  };
  const double limit = alpha + 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(opt.reps));
  std::vector<std::string> fails;
  std::string summary;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    const int64_t horizon = 2 * c.n_star;
    const int64_t n_min = (c.n_star + 9) / 10;
    auto glr = std::make_shared<const NullGeometry>(make_cs(c.fam, alpha, n_min, horizon, CsMode::GlrLike), c.mu0);
    auto dm = std::make_shared<const NullGeometry>(
        make_cs(c.fam, alpha, n_min, horizon, CsMode::DiscreteMixture), c.mu0);
    const auto sample = sampler_for(c.fam, c.mu0);
    const double za = z_upper(alpha);
    const int64_t k_fixed = c.fam.kind() == FamilyKind::Bernoulli ? binomial_critical_value(c.n_star, c.mu0, alpha) : 0;

    using Flags = std::array<char, kT1Count>;
    const auto flags = harness::parallel_map<Flags>(opt.reps, opt.threads, [&](int64_t rep) {
      auto rng = replication_rng(opt.seed, kTagType1, ci, static_cast<uint64_t>(rep));
      std::vector<TestState> tests;
      tests.emplace_back(c.fam, CsRule{glr});
      tests.emplace_back(c.fam, CsRule{dm});
      tests.push_back(make_sglr_const(c.fam, c.mu0, c.mu1, alpha));
      tests.push_back(make_sglr_noseq(c.fam, c.mu0, 2.0, alpha));
      tests.push_back(make_sprt_oracle(c.fam, c.mu0, c.mu1, alpha));
      Flags f{};
      for (int64_t n = 1; n <= horizon; ++n) {
        const double x = sample(rng);
        bool all_done = true;
        for (std::size_t t = 0; t < tests.size(); ++t) {
          if (f[t]) continue;
          if (tests[t].step(x) == Status::Rejected) {
            f[t] = 1;
          } else {
            all_done = false;
          }
        }
        if (n == c.n_star && c.has_fixed) {
          const double s = tests[0].sum();
          f[kT1Fixed] = c.fam.kind() == FamilyKind::Bernoulli
                            ? static_cast<int64_t>(std::llround(s)) >= k_fixed
                            : s / static_cast<double>(n) >= c.mu0 + za * c.fam.scale() / std::sqrt(static_cast<double>(n));
        }
        if (all_done && n >= c.n_star) break;
      }
      return f;
    });
    summary += c.label + ":";
    for (int t = 0; t < kT1Count; ++t) {
      if (t == kT1Fixed && !c.has_fixed) continue;
      int64_t hits = 0;
      for (const auto& f : flags) hits += f[static_cast<std::size_t>(t)];
      const double rate = static_cast<double>(hits) / static_cast<double>(opt.reps);
      summary += " " + std::string(kT1Names[t]) + "=" + fmt(rate, 4);
      if (rate > limit) fails.push_back(c.label + " " + kT1Names[t] + " rate " + fmt(rate, 4));
    }
    summary += "; ";
  }
  return {"5 type-1 error validity", fails.empty(),
          summary + "limit " + fmt(limit, 4) + (fails.empty() ? "" : "; " + join_failures(fails))};
}

Check coverage_validity(const SuiteOptions& opt) {
  harness::CoverageSpec spec;
  spec.reps = opt.reps;
  const auto res = harness::run_coverage(spec, {opt.seed, opt.threads});
  auto c = all_of("6 coverage validity", res.checks);
  std::string rows;
  for (const auto& r : res.rows) rows += r.family + "/" + r.mode + "=" + fmt(r.coverage, 4) + " ";
  c.detail = rows + "| " + c.detail;
  return c;
}

namespace {

struct PathCase {
  std::string label;
  PsiFamily fam;
  double mu_true;
  double r_lo, r_hi;  // offsets below the truth for the mu0 grid
};

std::vector<PathCase> path_cases() {
  return {
      {"gaussian", PsiFamily::sub_gaussian(1.0), 0.0, 0.005, 3.0},
      {"bernoulli", PsiFamily::bernoulli(), 0.3, 0.002, 0.29},
      {"poisson", PsiFamily::poisson(), 2.0, 0.005, 1.95},
  };
}

}  // namespace

Check containment(const SuiteOptions& opt) {
  constexpr double alpha = 0.05;
  constexpr int64_t horizon = 2000;
  constexpr int grid_points = 24;
  constexpr int64_t kEndpointStride = 50;
  std::vector<std::string> fails;
  int64_t comparisons = 0;
  const auto cases = path_cases();
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    const CsConfig glr_cfg = make_cs(c.fam, alpha, 10, 1000, CsMode::GlrLike);
    CsConfig dm_cfg = glr_cfg;
    dm_cfg.mode = CsMode::DiscreteMixture;
    std::vector<NullGeometry> glr, dm;
    for (int j = 0; j < grid_points; ++j) {
      const double r = c.r_lo * std::pow(c.r_hi / c.r_lo, static_cast<double>(j) / (grid_points - 1));
      glr.emplace_back(glr_cfg, c.mu_true - r);
      dm.emplace_back(dm_cfg, c.mu_true - r);
    }
    const auto sample = sampler_for(c.fam, c.mu_true);
    const std::vector<int64_t> endpoint_ns = {1, 5, 10, 100, 1000, 2000};
    struct PathOut {
      int64_t violations = 0;
      int64_t comparisons = 0;
      std::string first;
    };
    const auto out = harness::parallel_map<PathOut>(opt.paths, opt.threads, [&](int64_t p) {
      auto rng = replication_rng(opt.seed, kTagContainment, ci, static_cast<uint64_t>(p));
      PathOut o;
      double sum = 0.0;
      std::size_t next_end = 0;
      for (int64_t n = 1; n <= horizon; ++n) {
        sum += sample(rng);
        const double xbar = sum / static_cast<double>(n);
        for (int j = 0; j < grid_points; ++j) {
          ++o.comparisons;
          if (glr[j].glr_rejects(n, xbar) && !dm[j].mixture_rejects(n, xbar)) {
            if (o.violations++ == 0) o.first = "n=" + std::to_string(n) + " mu0=" + fmt(glr[j].mu0(), 6);
          }
        }
        // Endpoint searches can cost a full grid scan, so only a subsample of
        // paths compares them; the mu0 grid above covers every path.
        if (p % kEndpointStride == 0 && next_end < endpoint_ns.size() && endpoint_ns[next_end] == n) {
          ++next_end;
          ++o.comparisons;
          const auto lg = ci_lower(glr_cfg, n, xbar);
          const auto lm = ci_lower(dm_cfg, n, xbar);
          const bool coarse = lg.method == CiMethod::GridScan || lm.method == CiMethod::GridScan;
          const double span = std::min(c.fam.mean_hi(), xbar + 10.0) - std::max(c.fam.mean_lo(), xbar - 10.0);
          const double tol = coarse ? 2.0 * kGridResolution * span : 1e-9;
          if (lm.lower < lg.lower - tol) {
            if (o.violations++ == 0) {
              o.first = "endpoint n=" + std::to_string(n) + " " + fmt(lm.lower, 10) + " < " + fmt(lg.lower, 10);
            }
          }
        }
      }
      return o;
    });
    int64_t v = 0;
    std::string first;
    for (const auto& o : out) {
      v += o.violations;
      comparisons += o.comparisons;
      if (first.empty() && !o.first.empty()) first = o.first;
    }
    if (v > 0) fails.push_back(c.label + ": " + std::to_string(v) + " violations, first " + first);
  }
  return {"7 mixture set inside GLR-like set", fails.empty(),
          std::to_string(opt.paths) + " paths x 3 families, " + std::to_string(comparisons) +
              " comparisons (mu0 grid at every n; endpoints every " + std::to_string(kEndpointStride) +
              "th path)" + (fails.empty() ? "" : "; " + join_failures(fails))};
}

Check stopping_time_order(const SuiteOptions& opt) {
  constexpr double alpha = 0.1;
  constexpr double eta = 2.0;
  struct OrderCase {
    std::string label;
    PsiFamily fam;
    double mu0, mu1;
    int64_t horizon;
  };
  const std::vector<OrderCase> cases = {
      {"gaussian", PsiFamily::sub_gaussian(1.0), 0.0, 0.1, 5000},
      {"bernoulli", PsiFamily::bernoulli(), 0.1, 0.12, 10000},
      {"poisson", PsiFamily::poisson(), 2.0, 2.2, 5000},
  };
  std::vector<std::string> fails;
  std::string summary;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    const double g = solve_g_alpha_constant(bregman(c.fam, c.mu1, c.mu0), alpha);
    const Boundary boundary = ConstantBoundary{g};
    struct Setup {
      int64_t n_start;
      LineSet lines;
    };
    std::vector<Setup> setups;
    for (int64_t n_start : {int64_t{1}, int64_t{20}}) {
      setups.push_back({n_start, lemma_lines(c.fam, boundary, c.mu0, c.mu1, eta, n_start, c.horizon)});
    }
    struct Out {
      int64_t violations = 0;
      int64_t stopped = 0;
      std::string first;
    };
    const auto out = harness::parallel_map<Out>(opt.paths, opt.threads, [&](int64_t p) {
      auto rng = replication_rng(opt.seed, kTagOrder, ci, static_cast<uint64_t>(p));
      const double mu = c.mu0 + (c.mu1 - c.mu0) * std::uniform_real_distribution<double>(0.0, 3.0)(rng);
      const auto sample = sampler_for(c.fam, mu);
      const auto& s = setups[static_cast<std::size_t>(p % 2)];
      TestState gl(c.fam, GlrBoundaryRule{c.mu0, c.mu1, boundary, s.n_start});
      TestState ml(c.fam, LinesRule{s.lines, 0.0, false});
      TestState dm(c.fam, LinesRule{s.lines, 0.0, true});
      for (int64_t n = 1; n <= c.horizon; ++n) {
        const double x = sample(rng);
        gl.step(x);
        ml.step(x);
        dm.step(x);
        if (gl.status() == Status::Rejected) break;
      }
      auto stop = [&](const TestState& t) {
        return t.status() == Status::Rejected ? t.rejected_at() : c.horizon + 1;
      };
      Out o;
      const int64_t ngl = stop(gl), nml = stop(ml), ndm = stop(dm);
      o.stopped = ngl <= c.horizon;
      if (!(ndm <= nml && nml <= ngl)) {
        o.violations = 1;
        o.first = "mu=" + fmt(mu, 5) + " N_DM=" + std::to_string(ndm) + " N_ML=" + std::to_string(nml) +
                  " N_GL=" + std::to_string(ngl);
      }
      return o;
    });
    int64_t v = 0, stopped = 0;
    std::string first;
    for (const auto& o : out) {
      v += o.violations;
      stopped += o.stopped;
      if (first.empty() && !o.first.empty()) first = o.first;
    }
    summary += c.label + " stopped " + std::to_string(stopped) + "/" + std::to_string(opt.paths) + "; ";
    if (v > 0) fails.push_back(c.label + ": " + std::to_string(v) + " violations, first " + first);
  }
  return {"8 stopping-time ordering", fails.empty(),
          summary + (fails.empty() ? "no violations" : join_failures(fails))};
}

Check chernoff_match() {
  struct Window {
    int64_t lo, hi;
  };
  const std::vector<Window> windows = {{1, 100000}, {5000, 400000}, {10, 10000}};
  double worst = 0.0;
  int64_t count = 0;
  for (double sigma : {1.0, 2.5}) {
    const auto fam = PsiFamily::sub_gaussian(sigma);
    for (const auto& w : windows) {
      const auto cfg = make_cs(fam, 0.025, w.lo, w.hi);
      const double g = cfg.intervals[0].g;
      for (int64_t n = w.lo; n <= w.hi; ++n) {
        const double xbar = 0.37 * std::sin(static_cast<double>(n));
        const double want = xbar - sigma * std::sqrt(2.0 * g / static_cast<double>(n));
        worst = std::max(worst, std::abs(ci_lower(cfg, n, xbar).lower - want));
        ++count;
      }
    }
  }
  return {"9 Chernoff match on window", worst <= 1e-10,
          std::to_string(count) + " (n, window) points; max |diff| " + fmt(worst, 16)};
}

Check multistream_calibration(const SuiteOptions& opt) {
  harness::MultiStreamSpec spec;
  spec.reps = opt.reps;
  const auto res = harness::run_multistream(spec, {opt.seed, opt.threads});
  auto c = all_of("10 multi-stream calibration", res.checks);
  c.detail = "epsilon " + fmt(res.cal.epsilon, 3) + ", MC tail " + fmt(res.cal.mc_tail, 5) + " (SE " +
             fmt(res.cal.mc_se, 5) + "), bound " + fmt(res.cal.closed_form_bound, 5) + ", crossing " +
             fmt(res.crossing_rate, 4) + " | " + c.detail;
  return c;
}

Check high_probability_stopping(const SuiteOptions& opt) {
  // The stopping-time bound needs delta < alpha, so both deltas sit below 0.25.
  constexpr double alpha = 0.25;
  constexpr double c = 2.0;
  constexpr double mu = 0.5;
  constexpr int64_t cap = 1000000;
  const auto fam = PsiFamily::sub_gaussian(1.0);
  const auto stops = harness::parallel_map<int64_t>(opt.reps, opt.threads, [&](int64_t rep) {
    auto rng = replication_rng(opt.seed, kTagHighProb, 0, static_cast<uint64_t>(rep));
    std::normal_distribution<double> normal(mu, 1.0);
    auto t = make_sglr_noseq(fam, 0.0, c, alpha);
    for (int64_t n = 1; n <= cap; ++n) {
      if (sglr_noseq_step(t, normal(rng)) == Status::Rejected) return t.rejected_at();
    }
    return cap + 1;
  });
  std::vector<std::string> fails;
  std::string detail;
  const double reps = static_cast<double>(opt.reps);
  for (double delta : {0.05, 0.2}) {
    const auto th = t_high(fam, mu, 0.0, c, delta);
    int64_t within = 0, within_cf = 0;
    for (int64_t s : stops) {
      within += s <= th.t;
      within_cf += static_cast<double>(s) <= th.closed_form;
    }
    const double p = static_cast<double>(within) / reps;
    const double p_cf = static_cast<double>(within_cf) / reps;
    const double floor = 1.0 - delta - 3.0 * std::sqrt(delta * (1.0 - delta) / reps);
    detail += "delta=" + fmt(delta, 2) + ": t_high=" + std::to_string(th.t) + " P=" + fmt(p, 4) +
              ", closed form " + fmt(th.closed_form, 1) + " P=" + fmt(p_cf, 4) + "; ";
    if (p < floor) fails.push_back("P(N <= t_high) below floor at delta=" + fmt(delta, 2));
    if (p_cf < 1.0 - delta) fails.push_back("closed-form bound covers too few runs at delta=" + fmt(delta, 2));
  }
  return {"11 high-probability stopping bound", fails.empty(),
          detail + (fails.empty() ? "ok" : join_failures(fails))};
}

std::vector<Check> acceptance_suite(const SuiteOptions& opt) {
  return {boundary_solver_fidelity(opt), boundary_growth_curve(),     appd_gaussian_tables(opt),
          appd_bernoulli_tables(opt),    type1_validity(opt),        coverage_validity(opt),
          containment(opt),              stopping_time_order(opt),   chernoff_match(),
          multistream_calibration(opt),  high_probability_stopping(opt)};
}

std::vector<Check> extra_properties(const SuiteOptions& opt) {
  std::vector<Check> out;
  for (double a : {0.01, 0.05, 0.1}) {
    const double s = stitched_sum(LogLogBoundary{2.0, a}, 0.0, 2.0);
    const double want = a * (std::numbers::pi * std::numbers::pi / 6.0 - 1.0);
    out.push_back({"stitched log-log sum at alpha=" + fmt(a, 2),
                   std::abs(s - want) <= 1e-6 * a && s <= a,
                   fmt(s, 10) + " vs " + fmt(want, 10)});
  }

  auto spec = harness::appd_defaults(false);
  spec.reps = 200;
  const auto one = harness::to_csv(harness::run_appd(spec, {opt.seed, 1}).table("appd-gaussian"));
  const auto many = harness::to_csv(harness::run_appd(spec, {opt.seed, 3}).table("appd-gaussian"));
  out.push_back({"CSV identical for 1 and 3 workers", one == many, std::to_string(one.size()) + " bytes"});

  const auto res = harness::run_appd(spec, {opt.seed, opt.threads});
  bool ranges = true;
  for (const auto& r : res.rows) {
    if (!(r.reject_rate >= 0 && r.reject_rate <= 1 && r.early_stop >= 0 && r.early_stop <= 1 &&
          r.mean_n >= 1 && r.mean_n <= static_cast<double>(res.horizon))) {
      ranges = false;
    }
  }
  out.push_back({"rates in [0, 1] and sizes in [1, horizon]", ranges, ""});

  const auto f5 = harness::run_fig5(harness::Fig5Spec{});
  for (const auto& c : f5.checks) out.push_back(c);
  return out;
}

}  // namespace seqglr::properties
