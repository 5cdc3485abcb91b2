#include "seqglr/boundaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqglr/errors.hpp"
#include "seqglr/kernels.hpp"
#include "seqglr/root_find.hpp"

namespace seqglr {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

double loglog_eval(const LogLogBoundary& b, double t) {
  return b.c * (std::log(1.0 / b.alpha) + 2.0 * std::log1p(std::log(t) / std::log(b.c)));
}

// Log-log terms: alpha^{c/eta} (1 + k log_c eta)^{-2c/eta}.
double loglog_stitched(const LogLogBoundary& b, double eta, int64_t k_max) {
  const double a = std::log(eta) / std::log(b.c);
  const double p = 2.0 * b.c / eta;
  if (p <= 1.0) return kInf;
  const double scale = std::exp(-(b.c / eta) * std::log(1.0 / b.alpha));
  double sum = 0.0;
  int64_t k = 1;
  for (; k <= k_max; ++k) {
    const double term = std::pow(1.0 + static_cast<double>(k) * a, -p);
    sum += term;
    if (term < 1e-16) break;
  }
  const double last = static_cast<double>(std::min(k, k_max));
  // Integral comparison for the decreasing tail beyond the last summed term.
  const double tail = std::pow(1.0 + last * a, 1.0 - p) / (a * (p - 1.0));
  return scale * (sum + tail);
}

}  // namespace

double evaluate(const Boundary& b, double t) {
  if (!(t >= 1.0)) throw DomainError("boundaries are evaluated on [1, inf)");
  if (const auto* c = std::get_if<ConstantBoundary>(&b)) return c->g;
  if (const auto* l = std::get_if<LogLogBoundary>(&b)) return loglog_eval(*l, t);
  const auto& pc = std::get<PiecewiseConstantBoundary>(b);
  const auto it = std::upper_bound(pc.breaks.begin(), pc.breaks.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - pc.breaks.begin() - 1));
  return pc.values[idx];
}

void validate_shape(const Boundary& b) {
  if (const auto* c = std::get_if<ConstantBoundary>(&b)) {
    if (!(c->g >= 0.0) || !std::isfinite(c->g)) throw DomainError("constant boundary must be >= 0");
    return;
  }
  if (const auto* l = std::get_if<LogLogBoundary>(&b)) {
    if (!(l->c > 1.0)) throw DomainError("log-log boundary needs c > 1");
    check_alpha(l->alpha);
    return;
  }
  const auto& pc = std::get<PiecewiseConstantBoundary>(b);
  if (pc.breaks.empty() || pc.breaks.size() != pc.values.size() || pc.breaks.front() != 1.0) {
    throw DomainError("piecewise boundary needs matching breaks/values starting at 1");
  }
  for (std::size_t i = 1; i < pc.breaks.size(); ++i) {
    if (!(pc.breaks[i] > pc.breaks[i - 1])) throw DomainError("breaks must increase");
  }
  // Dense check over real t, including points just left of every break.
  std::vector<double> grid;
  for (double t = 1.0; t < 1e12; t *= 1.01) grid.push_back(t);
  for (double br : pc.breaks) {
    grid.push_back(br);
    if (br > 1.0) grid.push_back(std::nextafter(br, 0.0));
  }
  std::sort(grid.begin(), grid.end());
  double prev_g = -1.0;
  double prev_ratio = kInf;
  for (double t : grid) {
    const double g = evaluate(b, t);
    if (g < 0.0 || g < prev_g) throw DomainError("boundary must be nonnegative and nondecreasing");
    const double ratio = g / t;
    if (ratio > prev_ratio * (1.0 + 1e-12)) {
      throw DomainError("g(t)/t must be nonincreasing; violated near t = " + std::to_string(t));
    }
    prev_g = g;
    prev_ratio = ratio;
  }
}

std::optional<int64_t> k_eta(const Boundary& b, double d1, double eta) {
  if (!(eta > 1.0)) throw DomainError("eta must exceed 1");
  if (!(d1 >= 0.0)) throw DomainError("d1 must be nonnegative");
  if (d1 == 0.0) return std::nullopt;
  double t = 1.0;
  for (int64_t k = 0; k < 100000000; ++k) {
    if (d1 >= evaluate(b, t) / t) return k;
    t *= eta;
    if (!std::isfinite(t)) break;
  }
  throw NonSummable("K_eta did not terminate; boundary ratio does not vanish");
}

IntegerMin integer_min(double g, double ratio, bool full_scan, int64_t k_cap) {
  if (!(ratio > 0.0)) throw Degenerate("ratio must be positive");
  if (ratio >= 1.0) return {std::exp(-g), 1};
  const auto res = kernels::active().integer_min_scan(g, std::log(ratio), 1, k_cap,
                                                      full_scan ? 0 : kIntegerScanPatience);
  return {std::exp(res.log_value), res.k};
}

double crossing_bound_constant(double d1, double g, bool full_scan) {
  if (!(g > 0.0)) throw DomainError("boundary value g must be positive");
  if (!(d1 >= 0.0)) throw DomainError("d1 must be nonnegative");
  if (d1 == 0.0) {
    throw Degenerate("zero separation makes the constant-boundary bound vacuous; use a log-log "
                     "boundary");
  }
  if (d1 >= g) return std::exp(-g);
  return std::min(1.0, integer_min(g, d1 / g, full_scan).value);
}

double g_alpha_constant_upper(double d1, double alpha) {
  check_alpha(alpha);
  if (!(d1 > 0.0)) throw DomainError("d1 must be positive");
  double best = kInf;
  for (double le = 0.01; le <= 5.0; le *= 1.05) {
    const double eta = std::exp(le);
    const double inner = std::max(eta * std::sqrt(eta) / (alpha * d1 * le), 1.0);
    const double v = eta * std::log((1.0 / alpha) * (1.0 + 2.0 * std::log(inner) / le));
    best = std::min(best, v);
  }
  return best;
}

double solve_g_alpha_constant(double d1, double alpha) {
  check_alpha(alpha);
  if (!(d1 > 0.0)) throw DomainError("d1 must be positive");
  const double lo = std::log(1.0 / alpha);
  auto ok = [&](double g) { return crossing_bound_constant(d1, g) <= alpha; };
  if (lo > 0.0 && ok(lo)) return lo;
  double hi = std::max(g_alpha_constant_upper(d1, alpha), lo + 1.0);
  for (int guard = 0; !ok(hi); ++guard) {
    hi *= 2.0;
    if (guard > 60) throw NoSolution("could not bracket the constant boundary");
  }
  return bisect_predicate(std::max(lo, 1e-300), hi, ok, kBoundaryTol).hi;
}

double lorden_bound(double d1, double g) {
  if (!(g > 0.0) || !(d1 > 0.0)) throw DomainError("Lorden bound needs g > 0 and d1 > 0");
  if (d1 >= g) return std::exp(-g);
  return (1.0 + g / d1) * std::exp(-g);
}

double solve_g_alpha_lorden(double d1, double alpha) {
  check_alpha(alpha);
  if (!(d1 > 0.0)) throw DomainError("d1 must be positive");
  const double lo = std::log(1.0 / alpha);
  if (lo > 0.0 && d1 >= lo) return lo;
  // Past max(d1, 1 - d1) the second branch decreases in g.
  const double start = std::max({lo, d1, 1.0 - d1, 1e-12});
  auto ok = [&](double g) { return g > d1 && (1.0 + g / d1) * std::exp(-g) <= alpha; };
  double hi = start + 1.0;
  for (int guard = 0; !ok(hi); ++guard) {
    hi *= 2.0;
    if (guard > 60) throw NoSolution("could not bracket Lorden's boundary");
  }
  return bisect_predicate(start, hi, ok, kBoundaryTol).hi;
}

double loglog_boundary(double c, double alpha, double n) {
  if (!(c > 1.0)) throw DomainError("c must exceed 1");
  check_alpha(alpha);
  if (!(n >= 1.0)) throw DomainError("n must be >= 1");
  return loglog_eval({c, alpha}, n);
}

double stitched_sum(const Boundary& b, double d1, double eta, int64_t k_max) {
  const auto K = k_eta(b, d1, eta);
  if (K.has_value()) {
    double sum = 0.0;
    double t = eta;
    for (int64_t k = 1; k <= *K; ++k, t *= eta) sum += std::exp(-evaluate(b, t) / eta);
    return sum;
  }
  if (const auto* l = std::get_if<LogLogBoundary>(&b)) return loglog_stitched(*l, eta, k_max);
  double sum = 0.0;
  double prev = kInf;
  double t = eta;
  for (int64_t k = 1; k <= k_max; ++k, t *= eta) {
    const double term = std::exp(-evaluate(b, t) / eta);
    sum += term;
    if (term < 1e-16 && term < prev) return sum;
    prev = term;
    if (!std::isfinite(t)) break;
  }
  throw NonSummable("stitched terms are not decreasing below 1e-16 by k_max");
}

GeneralBound crossing_bound_general(const Boundary& b, double d1, const StitchParams& p) {
  validate_shape(b);
  if (!(d1 >= 0.0)) throw DomainError("d1 must be nonnegative");
  if (const auto* c = std::get_if<ConstantBoundary>(&b)) {
    const double v = crossing_bound_constant(d1, c->g);
    if (d1 >= c->g) return {v, 0.0};
    const auto im = integer_min(c->g, d1 / c->g);
    return {v, std::pow(c->g / d1, 1.0 / static_cast<double>(im.k))};
  }
  const double g1 = evaluate(b, 1.0);
  if (d1 >= g1) return {std::exp(-g1), 0.0};

  auto objective = [&](double eta) {
    try {
      return stitched_sum(b, d1, eta, p.k_max);
    } catch (const NonSummable&) {
      return kInf;
    }
  };
  if (p.eta > 1.0) return {std::min(1.0, objective(p.eta)), p.eta};

  constexpr int kGrid = 64;
  std::vector<double> log_eta(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    log_eta[i] = 0.01 * std::pow(500.0, static_cast<double>(i) / (kGrid - 1));
  }
  double best = kInf;
  double best_eta = 0.0;
  int best_i = -1;
  for (int i = 0; i < kGrid; ++i) {
    const double v = objective(std::exp(log_eta[i]));
    if (v < best) {
      best = v;
      best_eta = std::exp(log_eta[i]);
      best_i = i;
    }
  }
  if (const auto* l = std::get_if<LogLogBoundary>(&b)) {
    const double v = objective(l->c);
    if (v < best) {
      best = v;
      best_eta = l->c;
    }
  }
  if (best_i < 0 && !std::isfinite(best)) throw NonSummable("no eta gives a summable bound");
  if (best_i >= 0) {
    const double a = log_eta[std::max(0, best_i - 1)];
    const double c = log_eta[std::min(kGrid - 1, best_i + 1)];
    const double le = golden_min(a, c, [&](double x) { return objective(std::exp(x)); });
    const double v = objective(std::exp(le));
    if (v < best) {
      best = v;
      best_eta = std::exp(le);
    }
  }
  return {std::min(1.0, best), best_eta};
}

HighProbTime t_high(const PsiFamily& fam, double mu, double mu0, double c, double delta) {
  if (!(mu > mu0)) throw InvalidHypotheses("t_high needs mu > mu0");
  if (!(c > 1.0)) throw DomainError("c must exceed 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  const double ds = dstar(fam, mu, mu0);
  const double logc = std::log(c);
  auto holds = [&](double t) {
    return c * (std::log(1.0 / delta) + 2.0 * std::log(std::log(c * t) / logc)) / ds <= t;
  };
  int64_t t = 1;
  if (!holds(1.0)) {
    int64_t hi = 2;
    while (!holds(static_cast<double>(hi))) hi *= 2;
    int64_t lo = hi / 2;  // fails
    while (hi - lo > 1) {
      const int64_t mid = lo + (hi - lo) / 2;
      if (holds(static_cast<double>(mid))) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    t = hi;
  }
  const double pos = std::max(0.0, std::log(1.0 / ds) / logc);
  const double a = (2.0 * c / ds) * std::log(1.0 / delta) +
                   (2.0 * c / ds) *
                       std::log(2.0 * std::log(2.0 * c * c / logc) / logc + 2.0 * pos);
  return {t, std::max(1.0, a), ds};
}

double expected_n_bound_const(const PsiFamily& fam, double mu, double mu0, double mu1,
                              double alpha) {
  if (!(mu >= mu1 && mu1 > mu0)) throw InvalidHypotheses("need mu >= mu1 > mu0");
  const double d1 = bregman(fam, mu1, mu0);
  const double g = solve_g_alpha_constant(d1, alpha);
  const double d = bregman(fam, mu, mu0);
  const double sigma = std::sqrt(fam.variance_bound(mu));
  const double drift = sigma * fam.psi_star_grad(mu, mu0) / d;
  return g / d + drift * drift + 1.0;
}

double expected_n_bound_noseq(const PsiFamily& fam, double mu, double mu0, double c,
                              double alpha) {
  if (!(mu > mu0)) throw InvalidHypotheses("need mu > mu0");
  if (!(c > 1.0)) throw DomainError("c must exceed 1");
  check_alpha(alpha);
  const double ds = dstar(fam, mu, mu0);
  const double logc = std::log(c);
  const double pos = std::max(0.0, std::log(1.0 / ds) / logc);
  return 1.0 + (2.0 * c / ds) * std::log(1.0 / alpha) +
         (2.0 * c / ds) *
             std::log(2.0 * std::log(2.0 * std::pow(c, 2.5) / logc) / logc + 2.0 * pos);
}

}  // namespace seqglr
