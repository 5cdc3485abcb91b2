#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "seqglr/psi_family.hpp"

namespace seqglr {

struct ConstantBoundary {
  double g;
};

// g(n) = c [log(1/alpha) + 2 log(log_c(c n))].
struct LogLogBoundary {
  double c;
  double alpha;
};

// values[i] applies on [breaks[i], breaks[i+1]); breaks[0] must be 1.
struct PiecewiseConstantBoundary {
  std::vector<double> breaks;
  std::vector<double> values;
};

using Boundary = std::variant<ConstantBoundary, LogLogBoundary, PiecewiseConstantBoundary>;

double evaluate(const Boundary& b, double t);

// Numerical check of the two shape conditions (nonnegative nondecreasing g,
// nonincreasing g(t)/t with limit 0) on a dense geometric grid of real t.
// Throws DomainError on failure.
void validate_shape(const Boundary& b);

struct StitchParams {
  // Fixed eta when > 1; otherwise the infimum over eta is searched.
  double eta = 0.0;
  int64_t k_max = 100000;
};

// Smallest k >= 0 with d1 >= g(eta^k) / eta^k. Empty means infinity (d1 = 0).
std::optional<int64_t> k_eta(const Boundary& b, double d1, double eta);

struct IntegerMin {
  double value;  // min_k k exp(-g ratio^{1/k})
  int64_t k;     // smallest minimiser
};

inline constexpr int64_t kIntegerScanCap = 1000000;
inline constexpr int kIntegerScanPatience = 50;

// min over k in [1, k_cap] of k exp(-g ratio^{1/k}) for ratio in (0, 1].
IntegerMin integer_min(double g, double ratio, bool full_scan = false,
                       int64_t k_cap = kIntegerScanCap);

double crossing_bound_constant(double d1, double g, bool full_scan = false);
double solve_g_alpha_constant(double d1, double alpha);
// Closed-form upper bound on the constant-boundary level, used as a bracket.
double g_alpha_constant_upper(double d1, double alpha);

double lorden_bound(double d1, double g);
double solve_g_alpha_lorden(double d1, double alpha);

double loglog_boundary(double c, double alpha, double n);

// sum_{k=1}^{K_eta} exp(-g(eta^k) / eta) for a fixed eta. Infinite sums are
// truncated with an integral tail for the log-log boundary; other boundaries
// must have terms below 1e-16 and decreasing by k_max.
double stitched_sum(const Boundary& b, double d1, double eta, int64_t k_max = 100000);

struct GeneralBound {
  double value;
  double eta;  // eta attaining the reported value (0 on the single-line branch)
};

GeneralBound crossing_bound_general(const Boundary& b, double d1, const StitchParams& p = {});

struct HighProbTime {
  int64_t t;           // smallest integer t satisfying the defining inequality
  double closed_form;  // max(1, A)
  double dstar;
};

HighProbTime t_high(const PsiFamily& fam, double mu, double mu0, double c, double delta);

double expected_n_bound_const(const PsiFamily& fam, double mu, double mu0, double mu1,
                              double alpha);
double expected_n_bound_noseq(const PsiFamily& fam, double mu, double mu0, double c,
                              double alpha);

}  // namespace seqglr
