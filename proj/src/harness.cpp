#include "seqglr/harness.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "seqglr/boundaries.hpp"
#include "seqglr/confidence_sequences.hpp"
#include "seqglr/distributions.hpp"
#include "seqglr/errors.hpp"
#include "seqglr/rng.hpp"
#include "seqglr/root_find.hpp"

namespace seqglr::harness {

namespace {

constexpr uint64_t kScenarioAppdGaussian = 1;
constexpr uint64_t kScenarioAppdBernoulli = 2;
constexpr uint64_t kScenarioMultistream = 3;
constexpr uint64_t kScenarioCoverage = 4;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "' expects a number, got '" + std::string(text) + "'");
  }
  return v;
}

double sq(double x) { return x * x; }

double nominal_se(double p, int64_t reps) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

}  // namespace

// ---------------------------------------------------------------- config

Config parse_config(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    for (char ch : key) {
      if (!(std::islower(static_cast<unsigned char>(ch)) || std::isdigit(static_cast<unsigned char>(ch)) || ch == '_')) {
        throw ConfigError("line " + std::to_string(line_no) + ": bad key '" + key + "'");
      }
    }
    if (!cfg.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void check_keys(const Config& cfg, const std::vector<std::string>& allowed) {
  for (const auto& [k, v] : cfg) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
}

double get_double(const Config& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : parse_double(key, it->second);
}

int64_t get_int(const Config& cfg, const std::string& key, int64_t fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  const std::string_view text = trim(it->second);
  int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + it->second + "'");
  }
  return v;
}

std::string get_string(const Config& cfg, const std::string& key, const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

std::vector<double> get_list(const Config& cfg, const std::string& key,
                             const std::vector<double>& fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::vector<double> out;
  std::string_view rest = it->second;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_double(key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (out.empty()) throw ConfigError("key '" + key + "' needs at least one value");
  return out;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ------------------------------------------------------------------- csv

std::string fmt(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  std::string s(buf, res.ptr);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    if (!s.empty() && s[0] == '-') s.erase(0, 1);
  }
  return s;
}

std::string fmt_sci(double v, int digits) {
  if (!std::isfinite(v)) return fmt(v);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, digits);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& t) {
  std::string out = "# seqglr " + t.scenario + " v" + std::to_string(kCsvVersion) + "\n";
  auto join = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  join(t.header);
  for (const auto& r : t.rows) join(r);
  return out;
}

// ------------------------------------------------------------------ fig3

Table Fig3Result::table() const {
  Table t{"fig3", {"inv_gap", "d1", "g_lorden", "g_ours", "bound_ours"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({fmt(r.inv_gap, 1), fmt_sci(r.d1, 10), fmt(r.g_lorden, 6), fmt(r.g_ours, 6),
                      fmt(r.bound_ours, 10)});
  }
  return t;
}

Fig3Result run_fig3(const Fig3Spec& spec) {
  if (spec.points_per_decade < 1 || spec.log10_max <= spec.log10_min) {
    throw ConfigError("fig3 grid is empty");
  }
  Fig3Result res;
  const int steps = (spec.log10_max - spec.log10_min) * spec.points_per_decade;
  for (int j = 0; j <= steps; ++j) {
    const double e = spec.log10_min + static_cast<double>(j) / spec.points_per_decade;
    const double inv_gap = std::pow(10.0, e);
    const double d1 = sq(1.0 / (inv_gap * spec.sigma)) / 2.0;
    const double gl = solve_g_alpha_lorden(d1, spec.alpha);
    const double go = solve_g_alpha_constant(d1, spec.alpha);
    res.rows.push_back({inv_gap, d1, gl, go, crossing_bound_constant(d1, go)});
  }

  bool round_trip = true;
  bool below = true;
  for (const auto& r : res.rows) {
    if (!(r.bound_ours <= spec.alpha && r.bound_ours >= spec.alpha - 1e-6)) round_trip = false;
    if (r.inv_gap >= 1e3 * (1 - 1e-12) && !(r.g_ours < r.g_lorden)) below = false;
  }
  res.checks.push_back({"fig3 solver round trip", round_trip, "bound(g_ours) in [alpha - 1e-6, alpha]"});
  res.checks.push_back({"fig3 ours below Lorden for inv_gap >= 1e3", below, ""});

  auto at = [&](double inv) -> const Fig3Row* {
    for (const auto& r : res.rows) {
      if (std::abs(std::log10(r.inv_gap) - std::log10(inv)) < 1e-9) return &r;
    }
    return nullptr;
  };
  if (const auto* hi = at(1e10)) {
    res.checks.push_back({"fig3 practical level at gap 1e-10", hi->g_ours <= 60.0,
                          "g_ours = " + fmt(hi->g_ours, 4)});
    if (const auto* lo = at(1e2)) {
      res.checks.push_back({"fig3 g(1e10) < 10 g(1e2)", hi->g_ours < 10.0 * lo->g_ours,
                            fmt(hi->g_ours, 4) + " vs " + fmt(lo->g_ours, 4)});
    }
  }

  // Least-squares slope of g_lorden against log(1/D1).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(res.rows.size());
  for (const auto& r : res.rows) {
    const double x = std::log(1.0 / r.d1);
    sx += x;
    sy += r.g_lorden;
    sxx += x * x;
    sxy += x * r.g_lorden;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  res.checks.push_back({"fig3 Lorden log-linear slope >= 0.9", slope >= 0.9, "slope = " + fmt(slope, 4)});

  // Slopes of g_ours against log log(1/D1) must not increase.
  bool concave = true;
  double worst = -kInf;
  double prev_slope = kInf;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    const double x0 = std::log(std::log(1.0 / res.rows[i - 1].d1));
    const double x1 = std::log(std::log(1.0 / res.rows[i].d1));
    const double s = (res.rows[i].g_ours - res.rows[i - 1].g_ours) / (x1 - x0);
    if (i > 1) {
      worst = std::max(worst, s - prev_slope);
      if (s > prev_slope + 0.05 * std::abs(prev_slope) + 1e-6) concave = false;
    }
    prev_slope = s;
  }
  res.checks.push_back({"fig3 g_ours concave in log log(1/D1)", concave,
                        "largest slope increase = " + fmt(worst, 6)});
  return res;
}

// ------------------------------------------------------------------ fig5

Table Fig5Result::table() const {
  Table t{"fig5", {"n", "method", "ratio"}, {}};
  for (const auto& r : rows) t.rows.push_back({std::to_string(r.n), r.method, fmt(r.ratio, 6)});
  return t;
}

Fig5Result run_fig5(const Fig5Spec& spec) {
  if (spec.points_per_decade < 1 || spec.log10_n_max < 1) throw ConfigError("fig5 grid is empty");
  const PsiFamily fam = PsiFamily::sub_gaussian(spec.sigma);
  const CsConfig glr1 = make_cs(fam, spec.alpha, spec.w1_min, spec.w1_max);
  const CsConfig glr2 = make_cs(fam, spec.alpha, spec.w2_min, spec.w2_max);
  Fig5Result res{glr1.intervals[0].g, glr2.intervals[0].g, {}, {}};

  std::vector<int64_t> ns;
  for (int j = 0; j <= spec.points_per_decade * spec.log10_n_max; ++j) {
    const auto n = static_cast<int64_t>(std::llround(std::pow(10.0, static_cast<double>(j) / spec.points_per_decade)));
    if (ns.empty() || ns.back() != n) ns.push_back(n);
  }
  for (int64_t w : {spec.w1_min, spec.w1_max, spec.w2_min, spec.w2_max}) ns.push_back(w);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  const double z = z_upper(spec.alpha);
  const double chernoff_const = std::sqrt(2.0 * std::log(1.0 / spec.alpha)) / z;
  bool glr_flat = true;
  bool dm_inside = true;
  bool chernoff_flat = true;
  double worst_flat = 0.0;
  for (int64_t n : ns) {
    const double clt = z * spec.sigma / std::sqrt(static_cast<double>(n));
    const double chern = spec.sigma * std::sqrt(2.0 * std::log(1.0 / spec.alpha) / static_cast<double>(n));
    const double st = baseline_radius(CsMode::Stitching, spec.alpha, n, spec.sigma, spec.rho);
    const double nm = baseline_radius(CsMode::NormalMixture, spec.alpha, n, spec.sigma, spec.rho);
    const double g1 = -ci_lower(glr1, n, 0.0).lower;
    const double g2 = -ci_lower(glr2, n, 0.0).lower;
    const double d1 = -mixture_ci_lower(glr1, n, 0.0).lower;
    const double d2 = -mixture_ci_lower(glr2, n, 0.0).lower;
    res.rows.push_back({n, "chernoff", chern / clt});
    res.rows.push_back({n, "stitching", st / clt});
    res.rows.push_back({n, "normal-mixture", nm / clt});
    res.rows.push_back({n, "glr-1", g1 / clt});
    res.rows.push_back({n, "glr-2", g2 / clt});
    res.rows.push_back({n, "dm-1", d1 / clt});
    res.rows.push_back({n, "dm-2", d2 / clt});

    if (std::abs(chern / clt - chernoff_const) > 1e-12 * chernoff_const) chernoff_flat = false;
    auto flat = [&](int64_t lo, int64_t hi, double g, double ratio) {
      if (n < lo || n > hi) return;
      const double want = std::sqrt(2.0 * g) / z;
      const double rel = std::abs(ratio - want) / want;
      worst_flat = std::max(worst_flat, rel);
      if (rel > 1e-10) glr_flat = false;
    };
    flat(spec.w1_min, spec.w1_max, res.g1, g1 / clt);
    flat(spec.w2_min, spec.w2_max, res.g2, g2 / clt);
    if (d1 > g1 * (1 + 1e-9) + 1e-12 || d2 > g2 * (1 + 1e-9) + 1e-12) dm_inside = false;
  }
  res.checks.push_back({"fig5 GLR-like ratio constant on window", glr_flat,
                        "max relative deviation = " + fmt(worst_flat, 14)});
  res.checks.push_back({"fig5 discrete mixture inside GLR-like", dm_inside, ""});
  res.checks.push_back({"fig5 Chernoff ratio constant", chernoff_flat, ""});
  return res;
}

// ------------------------------------------------------------------ appd

AppdSpec appd_defaults(bool bernoulli) {
  AppdSpec s;
  s.bernoulli = bernoulli;
  if (bernoulli) {
    s.mu0 = 0.1;
    s.mu1 = 0.12;
    s.mus = {0.09, 0.10, 0.11, 0.12, 0.13, 0.14};
  } else {
    s.mu0 = 0.0;
    s.mu1 = 0.1;
    s.sigma = 1.0;
    s.mus = {-0.05, 0.0, 0.05, 0.10, 0.15, 0.20};
  }
  return s;
}

const MethodRow* AppdResult::find(double mu, const std::string& method) const {
  for (const auto& r : rows) {
    if (std::abs(r.mu - mu) < 1e-12 && r.method == method) return &r;
  }
  return nullptr;
}

Table AppdResult::table(const std::string& scenario) const {
  Table t{scenario, {"mu", "method", "reject_rate", "mean_n", "early_stop"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({fmt(r.mu, 4), r.method, fmt(r.reject_rate, 4), fmt(r.mean_n, 2),
                      fmt(r.early_stop, 4)});
  }
  return t;
}

namespace {

enum AppdMethod { kPhack = 0, kSglr, kSglrDm, kFixed, kSprt, kAppdMethods };
const char* const kAppdNames[kAppdMethods] = {"p-hacking", "sglr", "sglr-dm", "fixed", "sprt-oracle"};

}  // namespace

AppdResult run_appd(const AppdSpec& spec, const RunOptions& opt) {
  if (spec.reps < 1) throw ConfigError("reps must be >= 1");
  if (spec.mus.empty()) throw ConfigError("mu grid must be nonempty");
  if (!(spec.mu1 > spec.mu0)) throw ConfigError("appd needs mu1 > mu0");
  const PsiFamily fam = spec.bernoulli ? PsiFamily::bernoulli() : PsiFamily::sub_gaussian(spec.sigma);
  for (double mu : spec.mus) {
    if (!fam.in_mean_domain(mu)) throw ConfigError("true mean outside the family's mean domain");
  }
  if (spec.n_star < 0) throw ConfigError("n_star must be >= 0");
  const TestDesign design =
      spec.n_star > 0 ? TestDesign{spec.n_star, (spec.n_star + 9) / 10, 2 * spec.n_star}
                      : design_test_from_power(fam, spec.alpha, spec.beta, spec.mu0, spec.mu1);
  const int64_t n_star = design.n_star;
  const int64_t horizon = 2 * n_star;
  const int64_t phack_h = spec.phack == PhackHorizon::NStar ? n_star : horizon;

  const CsConfig glr_cfg = make_cs(fam, spec.alpha, design.n_min, design.n_max, CsMode::GlrLike);
  CsConfig dm_cfg = glr_cfg;
  dm_cfg.mode = CsMode::DiscreteMixture;
  const NullGeometry glr(glr_cfg, spec.mu0);
  const NullGeometry dm(dm_cfg, spec.mu0);

  // Fixed-sample rejection thresholds, per n.
  std::vector<double> z_cut(static_cast<std::size_t>(phack_h + 1), 0.0);
  std::vector<int64_t> k_cut(static_cast<std::size_t>(std::max(phack_h, n_star) + 1), 0);
  const double za = z_upper(spec.alpha);
  for (int64_t n = 1; n <= std::max(phack_h, n_star); ++n) {
    if (spec.bernoulli) {
      k_cut[static_cast<std::size_t>(n)] = binomial_critical_value(n, spec.mu0, spec.alpha);
    } else if (n <= phack_h) {
      z_cut[static_cast<std::size_t>(n)] = spec.mu0 + za * spec.sigma / std::sqrt(static_cast<double>(n));
    }
  }
  const double fixed_z = spec.mu0 + za * spec.sigma / std::sqrt(static_cast<double>(n_star));
  const double log_inv_alpha = std::log(1.0 / spec.alpha);

  AppdResult res{design, glr_cfg.intervals[0].g, horizon, {}};
  const uint64_t scenario = spec.bernoulli ? kScenarioAppdBernoulli : kScenarioAppdGaussian;

  for (std::size_t mi = 0; mi < spec.mus.size(); ++mi) {
    const double mu = spec.mus[mi];
    const bool with_sprt = mu >= spec.mu1 - 1e-12;
    double sprt_lambda = 0.0, sprt_psi = 0.0;
    if (with_sprt) {
      sprt_lambda = fam.psi_star_grad(mu, spec.mu0);
      sprt_psi = fam.psi(sprt_lambda, spec.mu0);
    }
    using Stops = std::array<int64_t, kAppdMethods>;
    const auto stops = parallel_map<Stops>(spec.reps, opt.threads, [&](int64_t rep) {
      auto rng = replication_rng(opt.seed, scenario, mi, static_cast<uint64_t>(rep));
      std::normal_distribution<double> normal(mu, spec.sigma);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      Stops st{};
      bool fixed_done = false;
      double sum = 0.0;
      const int64_t last = std::max(horizon, phack_h);
      for (int64_t n = 1; n <= last; ++n) {
        const double x = spec.bernoulli ? (unif(rng) < mu ? 1.0 : 0.0) : normal(rng);
        sum += x;
        const double nd = static_cast<double>(n);
        const double xbar = sum / nd;
        if (st[kPhack] == 0 && n <= phack_h) {
          const bool rej = spec.bernoulli
                               ? static_cast<int64_t>(std::llround(sum)) >= k_cut[static_cast<std::size_t>(n)]
                               : xbar >= z_cut[static_cast<std::size_t>(n)];
          if (rej) st[kPhack] = n;
        }
        if (n <= horizon) {
          if (st[kSglr] == 0 && glr.glr_rejects(n, xbar)) st[kSglr] = n;
          if (st[kSglrDm] == 0 && dm.mixture_rejects(n, xbar)) st[kSglrDm] = n;
          if (with_sprt && st[kSprt] == 0 && nd * (sprt_lambda * xbar - sprt_psi) >= log_inv_alpha) {
            st[kSprt] = n;
          }
        }
        if (n == n_star) {
          const bool rej = spec.bernoulli
                               ? static_cast<int64_t>(std::llround(sum)) >= k_cut[static_cast<std::size_t>(n)]
                               : xbar >= fixed_z;
          if (rej) st[kFixed] = n;
          fixed_done = true;
        }
        const bool seq_done = st[kSglr] != 0 && st[kSglrDm] != 0 && (!with_sprt || st[kSprt] != 0);
        if (fixed_done && seq_done && (st[kPhack] != 0 || n >= phack_h)) break;
      }
      return st;
    });

    for (int m = 0; m < kAppdMethods; ++m) {
      if (m == kSprt && !with_sprt) continue;
      const int64_t cap = m == kPhack ? phack_h : (m == kFixed ? n_star : horizon);
      int64_t rejected = 0, early = 0;
      double total_n = 0.0;
      for (const auto& st : stops) {
        const int64_t t = st[static_cast<std::size_t>(m)];
        if (t > 0) ++rejected;
        if (t > 0 && t < n_star) ++early;
        total_n += static_cast<double>(m == kFixed ? n_star : (t > 0 ? t : cap));
      }
      const double reps = static_cast<double>(spec.reps);
      res.rows.push_back({mu, kAppdNames[m], static_cast<double>(rejected) / reps, total_n / reps,
                          static_cast<double>(early) / reps});
    }
  }
  return res;
}

// ----------------------------------------------------------- multistream

Table MultiStreamResult::table() const {
  Table t{"multistream",
          {"epsilon", "mc_tail", "mc_se", "closed_form_bound", "closed_form_epsilon", "crossing_rate",
           "crossing_se"},
          {}};
  t.rows.push_back({fmt(cal.epsilon, 4), fmt(cal.mc_tail, 6), fmt(cal.mc_se, 6),
                    fmt(cal.closed_form_bound, 6), fmt(closed_form_epsilon, 6),
                    fmt(crossing_rate, 6), fmt(crossing_se, 6)});
  return t;
}

MultiStreamResult run_multistream(const MultiStreamSpec& spec, const RunOptions& opt) {
  if (spec.K < 1 || spec.reps < 1 || spec.horizon < 1) throw ConfigError("bad multistream settings");
  if (!(spec.c > 1.0)) throw ConfigError("c must exceed 1");
  MultiStreamResult res{};
  res.cal = calibrate_multistream(log_inverse_cal(spec.K, spec.mc_reps, opt.seed), spec.alpha);
  const double K = spec.K;
  // (eps/K)^K e^{K - eps} decreases on eps > K.
  res.closed_form_epsilon = bisect_increasing(K, K + 200.0, [&](double e) {
    return spec.alpha - multistream_tail_bound(spec.K, e);
  });

  const double eps = res.cal.epsilon;
  const double logc = std::log(spec.c);
  const auto crossed = parallel_map<char>(spec.reps, opt.threads, [&](int64_t rep) -> char {
    auto rng = replication_rng(opt.seed, kScenarioMultistream, 0, static_cast<uint64_t>(rep));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> sums(static_cast<std::size_t>(spec.K), 0.0);
    for (int64_t t = 1; t <= spec.horizon; ++t) {
      const double td = static_cast<double>(t);
      const double f = 2.0 * std::log(std::log(spec.c * td) / logc);
      double total = 0.0;
      for (auto& s : sums) {
        s += normal(rng);
        const double xbar = s / td;
        const double glr = xbar > 0.0 ? td * 0.5 * xbar * xbar : 0.0;
        total += glr / spec.c - f;
      }
      if (total >= eps) return 1;
    }
    return 0;
  });
  int64_t hits = 0;
  for (char c : crossed) hits += c;
  res.crossing_rate = static_cast<double>(hits) / static_cast<double>(spec.reps);
  res.crossing_se = nominal_se(spec.alpha, spec.reps);

  res.checks.push_back({"multistream MC tail within closed-form bound",
                        res.cal.mc_tail <= res.cal.closed_form_bound + 3.0 * res.cal.mc_se,
                        "tail " + fmt(res.cal.mc_tail, 5) + " vs bound " + fmt(res.cal.closed_form_bound, 5)});
  if (spec.K == 2) {
    const double exact = (1.0 + eps) * std::exp(-eps);
    res.checks.push_back({"multistream K=2 MC tail matches exact tail",
                          std::abs(res.cal.mc_tail - exact) <= 3.0 * res.cal.mc_se + 1e-3 * eps,
                          "MC " + fmt(res.cal.mc_tail, 5) + " vs exact " + fmt(exact, 5)});
  }
  res.checks.push_back({"multistream null crossing <= alpha + 3 SE",
                        res.crossing_rate <= spec.alpha + 3.0 * res.crossing_se,
                        "rate " + fmt(res.crossing_rate, 4)});
  return res;
}

// -------------------------------------------------------------- coverage

Table CoverageResult::table(int64_t reps, int64_t horizon) const {
  Table t{"coverage", {"family", "mode", "mu_true", "coverage", "se", "reps", "horizon"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.family, r.mode, fmt(r.mu_true, 4), fmt(r.coverage, 4), fmt(r.se, 4),
                      std::to_string(reps), std::to_string(horizon)});
  }
  return t;
}

namespace {

enum CovSlot {
  kGGlr = 0, kGDm, kGSt, kGNm, kGGlrDrift, kGDmDrift,
  kBGlr, kBDm, kBSt, kBNm, kCovSlots
};

}  // namespace

CoverageResult run_coverage(const CoverageSpec& spec, const RunOptions& opt) {
  if (spec.reps < 1 || spec.horizon < 1) throw ConfigError("bad coverage settings");
  const PsiFamily gauss = PsiFamily::sub_gaussian(1.0);
  const PsiFamily bern = PsiFamily::bernoulli();
  if (!bern.in_mean_domain(spec.bernoulli_mu)) throw ConfigError("bernoulli_mu must lie in (0, 1)");

  const CsConfig g_glr = make_cs(gauss, spec.alpha, spec.n_min, spec.n_max, CsMode::GlrLike);
  const CsConfig g_dm = make_cs(gauss, spec.alpha, spec.n_min, spec.n_max, CsMode::DiscreteMixture);
  const CsConfig b_glr = make_cs(bern, spec.alpha, spec.n_min, spec.n_max, CsMode::GlrLike);
  const CsConfig b_dm = make_cs(bern, spec.alpha, spec.n_min, spec.n_max, CsMode::DiscreteMixture);
  const NullGeometry gg(g_glr, spec.gaussian_mu), gd(g_dm, spec.gaussian_mu);
  const NullGeometry gg0(g_glr, 0.0), gd0(g_dm, 0.0);
  const NullGeometry bg(b_glr, spec.bernoulli_mu), bd(b_dm, spec.bernoulli_mu);

  const auto H = static_cast<std::size_t>(spec.horizon);
  std::vector<double> st_g(H + 1), nm_g(H + 1), st_b(H + 1), nm_b(H + 1);
  for (std::size_t n = 1; n <= H; ++n) {
    const auto ni = static_cast<int64_t>(n);
    st_g[n] = baseline_radius(CsMode::Stitching, spec.alpha, ni, 1.0);
    nm_g[n] = baseline_radius(CsMode::NormalMixture, spec.alpha, ni, 1.0);
    st_b[n] = baseline_radius(CsMode::Stitching, spec.alpha, ni, 0.5);
    nm_b[n] = baseline_radius(CsMode::NormalMixture, spec.alpha, ni, 0.5);
  }

  using Flags = std::array<char, kCovSlots>;
  const auto flags = parallel_map<Flags>(spec.reps, opt.threads, [&](int64_t rep) {
    Flags ok;
    ok.fill(1);
    auto rng = replication_rng(opt.seed, kScenarioCoverage, 0, static_cast<uint64_t>(rep));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double sg = 0.0, sd = 0.0, mean_sum = 0.0, sb = 0.0;
    for (std::size_t n = 1; n <= H; ++n) {
      const auto ni = static_cast<int64_t>(n);
      const double nd = static_cast<double>(n);
      const double z = normal(rng);
      // Conditional means drift deterministically around the base mean.
      const double mu_i = spec.gaussian_mu + 0.5 * std::sin(nd / 100.0);
      sg += spec.gaussian_mu + z;
      sd += mu_i + z;
      mean_sum += mu_i;
      sb += unif(rng) < spec.bernoulli_mu ? 1.0 : 0.0;
      const double xg = sg / nd, xd = sd / nd, mbar = mean_sum / nd, xb = sb / nd;
      if (ok[kGGlr] && gg.glr_rejects(ni, xg)) ok[kGGlr] = 0;
      if (ok[kGDm] && gd.mixture_rejects(ni, xg)) ok[kGDm] = 0;
      if (ok[kGSt] && !(spec.gaussian_mu > xg - st_g[n])) ok[kGSt] = 0;
      if (ok[kGNm] && !(spec.gaussian_mu > xg - nm_g[n])) ok[kGNm] = 0;
      if (ok[kGGlrDrift] && gg0.glr_rejects(ni, xd - mbar)) ok[kGGlrDrift] = 0;
      if (ok[kGDmDrift] && gd0.mixture_rejects(ni, xd - mbar)) ok[kGDmDrift] = 0;
      if (ok[kBGlr] && bg.glr_rejects(ni, xb)) ok[kBGlr] = 0;
      if (ok[kBDm] && bd.mixture_rejects(ni, xb)) ok[kBDm] = 0;
      if (ok[kBSt] && !(spec.bernoulli_mu > xb - st_b[n])) ok[kBSt] = 0;
      if (ok[kBNm] && !(spec.bernoulli_mu > xb - nm_b[n])) ok[kBNm] = 0;
    }
    return ok;
  });

  static const char* const kFamily[kCovSlots] = {"gaussian", "gaussian", "gaussian", "gaussian",
                                                 "gaussian", "gaussian", "bernoulli", "bernoulli",
                                                 "bernoulli", "bernoulli"};
  static const char* const kMode[kCovSlots] = {"glr", "dm", "stitching", "normal-mixture",
                                               "glr-drift", "dm-drift", "glr", "dm",
                                               "stitching", "normal-mixture"};
  CoverageResult res;
  const double se = nominal_se(spec.alpha, spec.reps);
  for (int s = 0; s < kCovSlots; ++s) {
    int64_t covered = 0;
    for (const auto& f : flags) covered += f[static_cast<std::size_t>(s)];
    const double cov = static_cast<double>(covered) / static_cast<double>(spec.reps);
    const double mu = s < kBGlr ? spec.gaussian_mu : spec.bernoulli_mu;
    res.rows.push_back({kFamily[s], kMode[s], mu, cov, se});
    res.checks.push_back({std::string("coverage ") + kFamily[s] + " " + kMode[s],
                          cov >= 1.0 - spec.alpha - 3.0 * se,
                          "coverage " + fmt(cov, 4) + " (floor " + fmt(1.0 - spec.alpha - 3.0 * se, 4) + ")"});
  }
  return res;
}

}  // namespace seqglr::harness
