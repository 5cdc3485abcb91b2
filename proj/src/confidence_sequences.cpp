#include "seqglr/confidence_sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqglr/boundaries.hpp"
#include "seqglr/errors.hpp"
#include "seqglr/kernels.hpp"
#include "seqglr/root_find.hpp"

namespace seqglr {

namespace {

// n0 values past this are treated as "no line exists".
constexpr int64_t kHugeN = 1000000000000000LL;

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

void check_window(int64_t n_min, int64_t n_max) {
  if (n_min < 1 || n_max < n_min) throw DomainError("target interval needs 1 <= n_min <= n_max");
}

// Positive root of psi*(u) = d for an additive family (mu0 = 0).
double additive_gap(const PsiFamily& fam, double d) {
  if (fam.kind() == FamilyKind::SubGaussian) return fam.scale() * std::sqrt(2.0 * d);
  return inv_bregman(fam, 0.0, d, Side::Upper);
}

double additive_lower(const PsiFamily& fam, const CsInterval& iv, int64_t n, double xbar) {
  const double g = iv.g;
  const double nd = static_cast<double>(n);
  const bool head = iv.head && iv.n_min > 1;
  if (n < iv.n_min) {
    if (!head) return -kInf;
    const double a = static_cast<double>(iv.n_min);
    const double gap = additive_gap(fam, g / a);
    const double slope = fam.psi_star_grad(gap, 0.0);
    return xbar - gap - (g / nd - g / a) / slope;
  }
  if (n <= iv.n_max) return xbar - additive_gap(fam, g / nd);
  const double b = static_cast<double>(iv.n_max);
  const double gap = additive_gap(fam, g / b);
  const double slope = fam.psi_star_grad(gap, 0.0);
  return xbar - gap - (g / nd - g / b) / slope;
}

CsConfig as_mixture(const CsConfig& cfg) {
  CsConfig out = cfg;
  out.mode = CsMode::DiscreteMixture;
  return out;
}

bool bernoulli_window_is_monotone(const CsConfig& cfg, int64_t n, double xbar) {
  if (cfg.mode != CsMode::GlrLike || cfg.family.kind() != FamilyKind::Bernoulli) return false;
  if (!(xbar > 0.0 && xbar < 1.0)) return false;
  for (const auto& iv : cfg.intervals) {
    if (n < iv.n_min || n > iv.n_max) return false;
    if (n0_strict(cfg.family, xbar, iv.g) > iv.n_min) return false;
  }
  return true;
}

CiResult search_lower(const CsConfig& cfg, int64_t n, double xbar) {
  const PsiFamily& fam = cfg.family;
  if (!fam.in_mean_closure(xbar)) throw DomainError("xbar lies outside the closure of M");
  auto rejects = [&](double mu0) { return NullGeometry(cfg, mu0).rejects(n, xbar); };

  const bool lo_finite = std::isfinite(fam.mean_lo());
  const bool hi_finite = std::isfinite(fam.mean_hi());
  if (lo_finite && xbar <= fam.mean_lo()) return {fam.mean_lo(), CiMethod::ClosedForm};

  double hi = xbar;
  if (hi_finite && hi >= fam.mean_hi()) {
    hi = fam.mean_hi() - 1e-12 * std::max(1.0, fam.mean_hi() - fam.mean_lo());
  }

  // A rejected starting point below xbar.
  double lo;
  if (lo_finite) {
    const double width = hi_finite ? fam.mean_hi() - fam.mean_lo() : std::max(1.0, xbar - fam.mean_lo());
    lo = fam.mean_lo() + 1e-12 * width;
    if (lo >= hi) return {fam.mean_lo(), CiMethod::ClosedForm};
  } else {
    double step = std::max(1.0, std::abs(xbar));
    lo = xbar - step;
    int guard = 0;
    while (!rejects(lo)) {
      step *= 2.0;
      lo = xbar - step;
      if (++guard > 200) return {-kInf, CiMethod::BinarySearch};
    }
  }

  const bool monotone = fam.is_additive() || fam.intervals_everywhere() ||
                        bernoulli_window_is_monotone(cfg, n, xbar);
  if (monotone) {
    if (!rejects(lo)) return {lo_finite ? fam.mean_lo() : lo, CiMethod::BinarySearch};
    if (rejects(hi)) return {hi, CiMethod::BinarySearch};
    const Bracket br = bisect_predicate(lo, hi, [&](double m) { return !rejects(m); }, kMeanTol);
    return {br.lo, CiMethod::BinarySearch};
  }

  // Grid scan from the bottom of the range: the answer is the last
  // non-member before the first member.
  const double base = lo_finite ? fam.mean_lo() : lo;
  const double span =
      lo_finite && hi_finite ? fam.mean_hi() - fam.mean_lo() : std::max(hi - base, 1e-300);
  const double step = kGridResolution * span;
  double prev = base;
  for (int64_t j = 1;; ++j) {
    const double mu = base + static_cast<double>(j) * step;
    if (mu > hi) break;
    if (!rejects(mu)) return {prev, CiMethod::GridScan};
    prev = mu;
  }
  return {prev, CiMethod::GridScan};
}

}  // namespace

void LineSet::push(double log_weight, double div, double slope, double point) {
  logw.push_back(log_weight);
  d.push_back(div);
  l.push_back(slope);
  z.push_back(point);
}

double lines_log_sum(const LineSet& lines, double n, double xbar) {
  if (lines.size() == 0) return -kInf;
  return kernels::active().mixture_log_sum(lines.logw.data(), lines.d.data(), lines.l.data(),
                                           lines.z.data(), lines.size(), n, xbar);
}

double lines_log_max(const LineSet& lines, double n, double xbar) {
  if (lines.size() == 0) return -kInf;
  return kernels::active().lines_log_max(lines.logw.data(), lines.d.data(), lines.l.data(),
                                         lines.z.data(), lines.size(), n, xbar);
}

IntervalBound interval_bound(double g, int64_t n_min, int64_t n_max, bool head) {
  check_window(n_min, n_max);
  if (!(g > 0.0)) throw DomainError("g must be positive");
  const double ratio = static_cast<double>(n_min) / static_cast<double>(n_max);
  const IntegerMin im = integer_min(g, ratio);
  const double eta =
      ratio >= 1.0 ? 1.0 : std::pow(1.0 / ratio, 1.0 / static_cast<double>(im.k));
  return {(head ? std::exp(-g) : 0.0) + im.value, im.k, eta};
}

GSolution solve_g_alpha_interval(double alpha, int64_t n_min, int64_t n_max, bool head) {
  check_alpha(alpha);
  check_window(n_min, n_max);
  auto ok = [&](double g) { return interval_bound(g, n_min, n_max, head).value <= alpha; };
  double lo = std::max(std::log(1.0 / alpha), 1e-12);
  double g;
  if (ok(lo)) {
    g = lo;
  } else {
    double hi = lo + 1.0;
    for (int guard = 0; !ok(hi); ++guard) {
      lo = hi;
      hi *= 2.0;
      if (guard > 60) throw NoSolution("could not bracket the interval boundary");
    }
    g = bisect_predicate(lo, hi, ok, 0.0).hi;
  }
  const IntervalBound ib = interval_bound(g, n_min, n_max, head);
  return {g, ib.k, ib.eta, ib.value};
}

int64_t n0(const PsiFamily& fam, double mu0, double g) {
  if (!(g > 0.0)) throw DomainError("g must be positive");
  if (!fam.in_mean_domain(mu0)) throw DomainError("mu0 is outside the mean domain");
  const double sup = fam.sup_divergence_upper(mu0);
  if (!std::isfinite(sup)) return 1;
  const double q = g / sup;
  if (!(q < static_cast<double>(kHugeN))) return kHugeN;
  auto n = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(q)));
  while (n > 1 && static_cast<double>(n - 1) * sup >= g) --n;
  while (static_cast<double>(n) * sup < g) ++n;
  return n;
}

int64_t n0_strict(const PsiFamily& fam, double mu0, double g) {
  if (!(g > 0.0)) throw DomainError("g must be positive");
  if (!fam.in_mean_domain(mu0)) throw DomainError("mu0 is outside the mean domain");
  const double sup = fam.sup_divergence_upper(mu0);
  if (!std::isfinite(sup)) return 1;
  const double q = g / sup;
  if (!(q < static_cast<double>(kHugeN))) return kHugeN;
  auto n = std::max<int64_t>(1, static_cast<int64_t>(std::floor(q)) + 1);
  while (n > 1 && static_cast<double>(n - 1) * sup > g) --n;
  while (!(static_cast<double>(n) * sup > g)) ++n;
  return n;
}

std::pair<double, double> mu1_mu2(const PsiFamily& fam, double mu0, double g, int64_t n_min,
                                  int64_t n_max) {
  check_window(n_min, n_max);
  if (!(g > 0.0)) throw DomainError("g must be positive");
  const double m1 = inv_bregman(fam, mu0, g / static_cast<double>(n_max), Side::Upper);
  const double m2 = n_min == n_max
                        ? m1
                        : inv_bregman(fam, mu0, g / static_cast<double>(n_min), Side::Upper);
  return {m1, m2};
}

CsConfig make_cs(const PsiFamily& fam, double alpha, int64_t n_min, int64_t n_max, CsMode mode) {
  if (mode == CsMode::Stitching || mode == CsMode::NormalMixture) {
    throw DomainError("use baseline_cs for the baseline modes");
  }
  return multi_interval_cs(fam, alpha, {{n_min, n_max}}, {}, mode);
}

CsConfig multi_interval_cs(const PsiFamily& fam, double alpha,
                           const std::vector<std::pair<int64_t, int64_t>>& intervals,
                           const std::vector<double>& g_values, CsMode mode) {
  check_alpha(alpha);
  if (intervals.empty()) throw DomainError("at least one target interval is required");
  if (!g_values.empty() && g_values.size() != intervals.size()) {
    throw DomainError("g_values must match the number of intervals");
  }
  CsConfig cfg{fam, alpha, mode, {}};
  const double share = alpha / static_cast<double>(intervals.size());
  int64_t prev_max = 1;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto [lo, hi] = intervals[i];
    check_window(lo, hi);
    if (i > 0 && lo < prev_max) throw OverlapError("target intervals overlap");
    const bool head = i == 0 ? lo > 1 : lo > prev_max;
    CsInterval iv{lo, hi, 0.0, head, 1, 1.0, 0.0};
    if (g_values.empty()) {
      const GSolution s = solve_g_alpha_interval(share, lo, hi, head);
      iv.g = s.g;
      iv.k = s.k;
      iv.eta = s.eta;
      iv.bound = s.bound;
    } else {
      iv.g = g_values[i];
      const IntervalBound ib = interval_bound(iv.g, lo, hi, head);
      iv.k = ib.k;
      iv.eta = ib.eta;
      iv.bound = ib.value;
    }
    cfg.intervals.push_back(iv);
    prev_max = hi;
  }
  return cfg;
}

CsConfig baseline_cs(CsMode kind, double alpha, double sigma, double rho) {
  if (kind != CsMode::Stitching && kind != CsMode::NormalMixture) {
    throw DomainError("baseline_cs takes a baseline mode");
  }
  check_alpha(alpha);
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  CsConfig cfg{PsiFamily::sub_gaussian(sigma), alpha, kind, {}};
  cfg.sigma = sigma;
  cfg.rho = rho;
  return cfg;
}

LocalInterval local_interval(const PsiFamily& fam, const CsInterval& iv, double mu0) {
  LocalInterval out;
  out.g = iv.g;
  const double g = iv.g;
  const int64_t ns = n0_strict(fam, mu0, g);
  if (ns >= kHugeN) {
    out.active = false;
    return out;
  }
  out.a = std::max(iv.n_min, ns);
  out.b = std::max(iv.n_max, out.a);
  out.head = iv.head && out.a > n0(fam, mu0, g);

  auto line_at = [&](double level, double& z, double& d, double& l) {
    z = inv_bregman(fam, mu0, level, Side::Upper);
    d = fam.psi_star(z, mu0);
    l = fam.psi_star_grad(z, mu0);
  };
  const double a = static_cast<double>(out.a);
  line_at(g / a, out.z2, out.d2, out.l2);
  if (out.b == out.a) {
    out.z1 = out.z2;
    out.d1 = out.d2;
    out.l1 = out.l2;
  } else {
    line_at(g / static_cast<double>(out.b), out.z1, out.d1, out.l1);
  }

  const IntervalBound ib = interval_bound(g, out.a, out.b, out.head);
  out.k = ib.k;
  out.eta = ib.eta;
  if (out.head) out.lines.push(-g, out.d2, out.l2, out.z2);
  const double logw = -g / out.eta;
  for (int64_t k = 1; k <= out.k; ++k) {
    if (k == out.k) {
      out.lines.push(logw, out.d1, out.l1, out.z1);
    } else {
      double z, d, l;
      line_at(g / (a * std::pow(out.eta, static_cast<double>(k))), z, d, l);
      out.lines.push(logw, d, l, z);
    }
  }
  out.log_m0 = log_add(out.head ? -g : -kInf, std::log(static_cast<double>(out.k)) + logw);
  return out;
}

NullGeometry::NullGeometry(const CsConfig& cfg, double mu0)
    : fam_(cfg.family), mode_(cfg.mode), mu0_(mu0), log_alpha_inv_(std::log(1.0 / cfg.alpha)) {
  if (mode_ == CsMode::Stitching || mode_ == CsMode::NormalMixture) {
    throw DomainError("baseline modes have closed forms and no null geometry");
  }
  if (!cfg.family.in_mean_domain(mu0)) throw DomainError("mu0 is outside the mean domain");
  local_.reserve(cfg.intervals.size());
  for (const auto& iv : cfg.intervals) {
    local_.push_back(local_interval(cfg.family, iv, mu0));
    const auto& li = local_.back();
    if (!li.active) continue;
    log_m0_ = log_add(log_m0_, li.log_m0);
    for (std::size_t k = 0; k < li.lines.size(); ++k) {
      all_lines_.push(li.lines.logw[k], li.lines.d[k], li.lines.l[k], li.lines.z[k]);
    }
  }
}

bool NullGeometry::glr_rejects(int64_t n, double xbar) const {
  const double nd = static_cast<double>(n);
  for (const auto& li : local_) {
    if (!li.active) continue;
    if (n < li.a) {
      if (li.head && nd * (li.d2 + li.l2 * (xbar - li.z2)) >= li.g) return true;
    } else if (n <= li.b) {
      if (xbar >= mu0_ && nd * fam_.psi_star(xbar, mu0_) >= li.g) return true;
    } else if (nd * (li.d1 + li.l1 * (xbar - li.z1)) >= li.g) {
      return true;
    }
  }
  return false;
}

double NullGeometry::mixture_log_ratio(int64_t n, double xbar) const {
  if (n == 0) return 0.0;
  return lines_log_sum(all_lines_, static_cast<double>(n), xbar) - log_m0_;
}

bool NullGeometry::mixture_rejects(int64_t n, double xbar) const {
  if (all_lines_.size() == 0) return false;
  return mixture_log_ratio(n, xbar) >= log_alpha_inv_;
}

bool NullGeometry::rejects(int64_t n, double xbar) const {
  return mode_ == CsMode::DiscreteMixture ? mixture_rejects(n, xbar) : glr_rejects(n, xbar);
}

MixtureGrid mixture_grid(const PsiFamily& fam, const CsInterval& iv, double mu0) {
  LocalInterval li = local_interval(fam, iv, mu0);
  if (!li.active) throw NoSolution("no mixture component exists at this mu0");
  return {li.g, li.eta, li.k, li.head, mu0, std::move(li.lines), li.log_m0};
}

double mixture_log_statistic(const MixtureGrid& grid, int64_t n, double xbar) {
  if (n < 0) throw DomainError("n must be nonnegative");
  if (n == 0) return grid.log_m0;
  return lines_log_sum(grid.lines, static_cast<double>(n), xbar);
}

double mixture_statistic(const MixtureGrid& grid, int64_t n, double xbar) {
  return std::exp(mixture_log_statistic(grid, n, xbar));
}

CiResult ci_lower(const CsConfig& cfg, int64_t n, double xbar) {
  if (n < 1) throw DomainError("n must be >= 1");
  switch (cfg.mode) {
    case CsMode::Stitching:
    case CsMode::NormalMixture:
      return {baseline_ci_lower(cfg.mode, cfg.alpha, n, xbar, cfg.sigma, cfg.rho),
              CiMethod::ClosedForm};
    case CsMode::GlrLike:
      if (cfg.family.is_additive()) {
        double best = -kInf;
        for (const auto& iv : cfg.intervals) {
          best = std::max(best, additive_lower(cfg.family, iv, n, xbar));
        }
        return {best, CiMethod::ClosedForm};
      }
      return search_lower(cfg, n, xbar);
    case CsMode::DiscreteMixture:
      return search_lower(cfg, n, xbar);
  }
  return {-kInf, CiMethod::ClosedForm};
}

CiResult mixture_ci_lower(const CsConfig& cfg, int64_t n, double xbar) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (cfg.mode == CsMode::DiscreteMixture) return search_lower(cfg, n, xbar);
  if (cfg.mode != CsMode::GlrLike) throw DomainError("mixture CI needs a GLR-like target");
  return search_lower(as_mixture(cfg), n, xbar);
}

CiResult ci_upper(const CsConfig& cfg, int64_t n, double xbar) {
  switch (cfg.family.kind()) {
    case FamilyKind::SubGaussian: {
      const CiResult r = ci_lower(cfg, n, -xbar);
      return {-r.lower, r.method};
    }
    case FamilyKind::Bernoulli: {
      const CiResult r = ci_lower(cfg, n, 1.0 - xbar);
      return {1.0 - r.lower, r.method};
    }
    default:
      throw Unsupported("upper confidence bounds need a reflection-closed family");
  }
}

bool cs_contains(const CsConfig& cfg, int64_t n, double xbar, double mu0) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (cfg.mode == CsMode::Stitching || cfg.mode == CsMode::NormalMixture) {
    return mu0 > baseline_ci_lower(cfg.mode, cfg.alpha, n, xbar, cfg.sigma, cfg.rho);
  }
  if (!cfg.family.in_mean_domain(mu0)) return false;
  return !NullGeometry(cfg, mu0).rejects(n, xbar);
}

double baseline_radius(CsMode kind, double alpha, int64_t n, double sigma, double rho) {
  if (n < 1) throw DomainError("n must be >= 1");
  check_alpha(alpha);
  const double nd = static_cast<double>(n);
  if (kind == CsMode::Stitching) {
    return sigma * 1.7 / std::sqrt(nd) *
           std::sqrt(std::log(std::log(2.0 * nd)) + 0.72 * std::log(5.2 / alpha));
  }
  if (kind == CsMode::NormalMixture) {
    const double v = 2.0 * (1.0 / nd + rho / (nd * nd)) *
                     std::log((1.0 / (2.0 * alpha)) * std::sqrt((nd + rho) / rho + 1.0));
    return sigma * std::sqrt(v);
  }
  throw DomainError("baseline_radius takes a baseline mode");
}

double baseline_ci_lower(CsMode kind, double alpha, int64_t n, double xbar, double sigma,
                         double rho) {
  return xbar - baseline_radius(kind, alpha, n, sigma, rho);
}

}  // namespace seqglr
