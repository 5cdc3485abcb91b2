// Command-line runner for the experiment scenarios and the property suite.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "seqglr/errors.hpp"
#include "seqglr/harness.hpp"
#include "seqglr/properties.hpp"

namespace h = seqglr::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::optional<uint64_t> seed;
  std::optional<int64_t> reps;
  std::optional<int> threads;
  std::string out;
  std::string config;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--seed", f.seed, "64-bit master seed");
  sub->add_option("--reps", f.reps, "Monte Carlo replications");
  sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  sub->add_option("--out", f.out, "CSV output path (default: stdout)");
  sub->add_option("--config", f.config, "key = value config file");
}

struct Resolved {
  h::Config cfg;
  h::RunOptions run;
  std::optional<int64_t> reps;
};

Resolved resolve(const CommonFlags& f, std::vector<std::string> keys) {
  Resolved r;
  if (!f.config.empty()) r.cfg = h::load_config(f.config);
  for (const char* k : {"seed", "reps", "threads"}) keys.emplace_back(k);
  h::check_keys(r.cfg, keys);
  r.run.seed = static_cast<uint64_t>(h::get_int(r.cfg, "seed", static_cast<int64_t>(r.run.seed)));
  r.run.threads = static_cast<int>(h::get_int(r.cfg, "threads", 0));
  if (r.cfg.count("reps")) r.reps = h::get_int(r.cfg, "reps", 0);
  if (f.seed) r.run.seed = *f.seed;
  if (f.threads) r.run.threads = *f.threads;
  if (f.reps) r.reps = *f.reps;
  if (r.reps && *r.reps < 1) throw seqglr::ConfigError("reps must be >= 1");
  if (r.run.threads < 0) throw seqglr::ConfigError("threads must be >= 0");
  return r;
}

void emit(const CommonFlags& f, const h::Table& t) {
  const std::string csv = h::to_csv(t);
  if (f.out.empty()) {
    std::cout << csv;
    return;
  }
  std::ofstream os(f.out, std::ios::binary);
  if (!os) throw seqglr::ConfigError("cannot write '" + f.out + "'");
  os << csv;
}

int report(const std::vector<h::Check>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cerr << " : " << c.detail;
    std::cerr << "\n";
    ok = ok && c.pass;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int run_fig3(const CommonFlags& f) {
  const auto r = resolve(f, {"alpha", "sigma", "log10_min", "log10_max", "points_per_decade"});
  h::Fig3Spec s;
  s.alpha = h::get_double(r.cfg, "alpha", s.alpha);
  s.sigma = h::get_double(r.cfg, "sigma", s.sigma);
  s.log10_min = static_cast<int>(h::get_int(r.cfg, "log10_min", s.log10_min));
  s.log10_max = static_cast<int>(h::get_int(r.cfg, "log10_max", s.log10_max));
  s.points_per_decade = static_cast<int>(h::get_int(r.cfg, "points_per_decade", s.points_per_decade));
  const auto res = h::run_fig3(s);
  emit(f, res.table());
  return report(res.checks);
}

int run_fig5(const CommonFlags& f) {
  const auto r = resolve(f, {"alpha", "sigma", "rho", "points_per_decade", "log10_n_max", "w1_min",
                             "w1_max", "w2_min", "w2_max"});
  h::Fig5Spec s;
  s.alpha = h::get_double(r.cfg, "alpha", s.alpha);
  s.sigma = h::get_double(r.cfg, "sigma", s.sigma);
  s.rho = h::get_double(r.cfg, "rho", s.rho);
  s.points_per_decade = static_cast<int>(h::get_int(r.cfg, "points_per_decade", s.points_per_decade));
  s.log10_n_max = static_cast<int>(h::get_int(r.cfg, "log10_n_max", s.log10_n_max));
  s.w1_min = h::get_int(r.cfg, "w1_min", s.w1_min);
  s.w1_max = h::get_int(r.cfg, "w1_max", s.w1_max);
  s.w2_min = h::get_int(r.cfg, "w2_min", s.w2_min);
  s.w2_max = h::get_int(r.cfg, "w2_max", s.w2_max);
  const auto res = h::run_fig5(s);
  emit(f, res.table());
  return report(res.checks);
}

int run_appd(const CommonFlags& f, bool bernoulli) {
  std::vector<std::string> keys = {"alpha", "beta", "mu0", "mu1", "mu_grid", "n_star", "phack_horizon"};
  if (!bernoulli) keys.emplace_back("sigma");
  const auto r = resolve(f, keys);
  auto s = h::appd_defaults(bernoulli);
  s.alpha = h::get_double(r.cfg, "alpha", s.alpha);
  s.beta = h::get_double(r.cfg, "beta", s.beta);
  s.mu0 = h::get_double(r.cfg, "mu0", s.mu0);
  s.mu1 = h::get_double(r.cfg, "mu1", s.mu1);
  s.sigma = h::get_double(r.cfg, "sigma", s.sigma);
  s.mus = h::get_list(r.cfg, "mu_grid", s.mus);
  s.n_star = h::get_int(r.cfg, "n_star", s.n_star);
  const auto ph = h::get_string(r.cfg, "phack_horizon", "2n_star");
  if (ph == "n_star") {
    s.phack = h::PhackHorizon::NStar;
  } else if (ph == "2n_star") {
    s.phack = h::PhackHorizon::TwoNStar;
  } else {
    throw seqglr::ConfigError("phack_horizon must be n_star or 2n_star");
  }
  if (r.reps) s.reps = *r.reps;
  const auto res = h::run_appd(s, r.run);
  std::cerr << "n* = " << res.design.n_star << ", target window [" << res.design.n_min << ", "
            << res.design.n_max << "], g = " << h::fmt(res.g, 6) << "\n";
  emit(f, res.table(bernoulli ? "appd-bernoulli" : "appd-gaussian"));
  return kExitOk;
}

int run_multistream(const CommonFlags& f) {
  const auto r = resolve(f, {"alpha", "k", "mc_reps", "c", "horizon"});
  h::MultiStreamSpec s;
  s.alpha = h::get_double(r.cfg, "alpha", s.alpha);
  s.K = static_cast<int>(h::get_int(r.cfg, "k", s.K));
  s.mc_reps = h::get_int(r.cfg, "mc_reps", s.mc_reps);
  s.c = h::get_double(r.cfg, "c", s.c);
  s.horizon = h::get_int(r.cfg, "horizon", s.horizon);
  if (r.reps) s.reps = *r.reps;
  const auto res = h::run_multistream(s, r.run);
  emit(f, res.table());
  return report(res.checks);
}

int run_coverage(const CommonFlags& f) {
  const auto r = resolve(f, {"alpha", "horizon", "n_min", "n_max", "gaussian_mu", "bernoulli_mu"});
  h::CoverageSpec s;
  s.alpha = h::get_double(r.cfg, "alpha", s.alpha);
  s.horizon = h::get_int(r.cfg, "horizon", s.horizon);
  s.n_min = h::get_int(r.cfg, "n_min", s.n_min);
  s.n_max = h::get_int(r.cfg, "n_max", s.n_max);
  s.gaussian_mu = h::get_double(r.cfg, "gaussian_mu", s.gaussian_mu);
  s.bernoulli_mu = h::get_double(r.cfg, "bernoulli_mu", s.bernoulli_mu);
  if (r.reps) s.reps = *r.reps;
  const auto res = h::run_coverage(s, r.run);
  emit(f, res.table(s.reps, s.horizon));
  return report(res.checks);
}

int run_properties(const CommonFlags& f, std::optional<int64_t> paths) {
  const auto r = resolve(f, {"paths"});
  seqglr::properties::SuiteOptions o;
  o.seed = r.run.seed;
  o.threads = r.run.threads;
  if (r.reps) o.reps = *r.reps;
  o.paths = h::get_int(r.cfg, "paths", o.paths);
  if (paths) o.paths = *paths;
  if (o.paths < 1) throw seqglr::ConfigError("paths must be >= 1");
  auto checks = seqglr::properties::acceptance_suite(o);
  for (auto& c : seqglr::properties::extra_properties(o)) checks.push_back(std::move(c));

  h::Table t{"properties", {"property", "pass", "detail"}, {}};
  for (const auto& c : checks) {
    std::string detail = c.detail;
    for (char& ch : detail) {
      if (ch == ',') ch = ';';
    }
    t.rows.push_back({c.name, c.pass ? "1" : "0", detail});
  }
  emit(f, t);
  return report(checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqglr: sequential GLR-like tests and confidence sequences"};
  app.require_subcommand(1);

  CommonFlags f;
  std::optional<int64_t> paths;
  auto* fig3 = app.add_subcommand("fig3", "boundary value against the separation");
  auto* fig5 = app.add_subcommand("fig5", "confidence interval width ratios");
  auto* appd_g = app.add_subcommand("appd-gaussian", "Gaussian testing simulation");
  auto* appd_b = app.add_subcommand("appd-bernoulli", "Bernoulli testing simulation");
  auto* multi = app.add_subcommand("multistream", "multi-stream calibration and null crossing");
  auto* cover = app.add_subcommand("coverage", "Monte Carlo coverage of every CS mode");
  auto* props = app.add_subcommand("properties", "acceptance criteria and property checks");
  for (auto* sub : {fig3, fig5, appd_g, appd_b, multi, cover, props}) add_common(sub, f);
  props->add_option("--paths", paths, "sample paths per family for pathwise checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*fig3) return run_fig3(f);
    if (*fig5) return run_fig5(f);
    if (*appd_g) return run_appd(f, false);
    if (*appd_b) return run_appd(f, true);
    if (*multi) return run_multistream(f);
    if (*cover) return run_coverage(f);
    return run_properties(f, paths);
  } catch (const seqglr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const seqglr::Error& e) {
    std::cerr << "invalid settings: " << e.what() << "\n";
    return kExitConfig;
  }
}
