#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "seqglr/psi_family.hpp"

namespace seqglr {

enum class CsMode { GlrLike, DiscreteMixture, Stitching, NormalMixture };

// Weighted tangent lines; line k contributes
// logw[k] + n (d[k] + l[k] (xbar - z[k])) on the log scale.
struct LineSet {
  std::vector<double> logw;
  std::vector<double> d;
  std::vector<double> l;
  std::vector<double> z;

  std::size_t size() const { return z.size(); }
  void push(double log_weight, double div, double slope, double point);
};

double lines_log_sum(const LineSet& lines, double n, double xbar);
double lines_log_max(const LineSet& lines, double n, double xbar);

// head e^{-g} + min_k k exp(-g (n_min/n_max)^{1/k}).
struct IntervalBound {
  double value;
  int64_t k;     // K_alpha, smallest minimiser
  double eta;    // (n_max/n_min)^{1/K_alpha}
};
IntervalBound interval_bound(double g, int64_t n_min, int64_t n_max, bool head);

struct GSolution {
  double g;
  int64_t k;
  double eta;
  double bound;  // interval_bound at g, never above alpha
};
GSolution solve_g_alpha_interval(double alpha, int64_t n_min, int64_t n_max, bool head);

// Smallest n with sup_{z > mu0} D(z, mu0) >= g / n.
int64_t n0(const PsiFamily& fam, double mu0, double g);
// Smallest n with sup D > g / n, so that D(z, mu0) = g / n has a root.
int64_t n0_strict(const PsiFamily& fam, double mu0, double g);

std::pair<double, double> mu1_mu2(const PsiFamily& fam, double mu0, double g, int64_t n_min,
                                  int64_t n_max);

struct CsInterval {
  int64_t n_min;
  int64_t n_max;
  double g;
  bool head;
  int64_t k;
  double eta;
  double bound;
};

struct CsConfig {
  PsiFamily family;
  double alpha;
  CsMode mode;
  std::vector<CsInterval> intervals;
  double sigma = 1.0;  // baselines only
  double rho = 1260.0;  // normal-mixture baseline only
};

CsConfig make_cs(const PsiFamily& fam, double alpha, int64_t n_min, int64_t n_max,
                 CsMode mode = CsMode::GlrLike);

// Intervals must be ordered with n_max^{(k-1)} <= n_min^{(k)}. When g_values
// is empty each interval is solved at level alpha / K. The membership set is
// the intersection of the per-interval sets.
CsConfig multi_interval_cs(const PsiFamily& fam, double alpha,
                           const std::vector<std::pair<int64_t, int64_t>>& intervals,
                           const std::vector<double>& g_values = {},
                           CsMode mode = CsMode::GlrLike);

CsConfig baseline_cs(CsMode kind, double alpha, double sigma, double rho = 1260.0);

// Geometry of one target interval at a fixed mu0. The effective window
// [a, b] raises n_min to n0_strict(mu0) when needed.
struct LocalInterval {
  int64_t a = 0;
  int64_t b = 0;
  double g = 0.0;
  bool head = false;
  bool active = true;  // false when mu0 sits so close to sup M that no line exists
  double z2 = 0.0, d2 = 0.0, l2 = 0.0;
  double z1 = 0.0, d1 = 0.0, l1 = 0.0;
  int64_t k = 1;
  double eta = 1.0;
  LineSet lines;  // mixture components, head line first when present
  double log_m0 = -kInf;
};

LocalInterval local_interval(const PsiFamily& fam, const CsInterval& iv, double mu0);

// Fixed-mu0 view of a GLR-like or discrete-mixture configuration. Built once
// per mu0; membership queries are then cheap.
class NullGeometry {
 public:
  NullGeometry(const CsConfig& cfg, double mu0);

  double mu0() const { return mu0_; }
  const std::vector<LocalInterval>& intervals() const { return local_; }

  bool glr_rejects(int64_t n, double xbar) const;
  // log M_n - log M_0 summed over all intervals.
  double mixture_log_ratio(int64_t n, double xbar) const;
  double log_m0() const { return log_m0_; }
  bool mixture_rejects(int64_t n, double xbar) const;
  // Dispatches on the configuration mode.
  bool rejects(int64_t n, double xbar) const;

 private:
  PsiFamily fam_;
  CsMode mode_;
  double mu0_;
  double log_alpha_inv_;
  double log_m0_ = -kInf;
  std::vector<LocalInterval> local_;
  LineSet all_lines_;
};

// Single-interval mixture at fixed mu0, exposed for direct inspection.
struct MixtureGrid {
  double g;
  double eta;
  int64_t k;
  bool head;
  double mu0;
  LineSet lines;
  double log_m0;
};

MixtureGrid mixture_grid(const PsiFamily& fam, const CsInterval& iv, double mu0);
// M_n(mu0); n = 0 returns M_0. Overflow gives +inf.
double mixture_statistic(const MixtureGrid& grid, int64_t n, double xbar);
double mixture_log_statistic(const MixtureGrid& grid, int64_t n, double xbar);

enum class CiMethod { ClosedForm, BinarySearch, GridScan };

struct CiResult {
  double lower;
  CiMethod method;
};

inline constexpr double kGridResolution = 1e-5;

// Infimum of the one-sided confidence set (lower, inf) at time n. Dispatches
// on the configuration mode.
CiResult ci_lower(const CsConfig& cfg, int64_t n, double xbar);
// Same as ci_lower for a DiscreteMixture configuration; accepts a GlrLike
// configuration and builds the matching mixture.
CiResult mixture_ci_lower(const CsConfig& cfg, int64_t n, double xbar);
// Mirror image for the upper end; supported for the sub-Gaussian and
// Bernoulli families, whose reflections stay in the family.
CiResult ci_upper(const CsConfig& cfg, int64_t n, double xbar);

// Membership of mu0 in the confidence set at time n.
bool cs_contains(const CsConfig& cfg, int64_t n, double xbar, double mu0);

double baseline_radius(CsMode kind, double alpha, int64_t n, double sigma, double rho = 1260.0);
double baseline_ci_lower(CsMode kind, double alpha, int64_t n, double xbar, double sigma,
                         double rho = 1260.0);

}  // namespace seqglr
