#include "seqglr/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqglr/errors.hpp"

namespace seqglr {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Wichura's AS241 (PPND16), accurate to about 1e-16 in double precision.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw DomainError("normal quantile needs p in [0, 1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double binomial_log_pmf(int64_t n, int64_t k, double p) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  double out = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
  if (k > 0) out += kd * std::log(p);
  if (k < n) out += (nd - kd) * std::log1p(-p);
  return out;
}

namespace {

// log(exp(a) + exp(b)).
double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Index beyond which the pmf is negligible (more than 40 sd above the mean).
int64_t upper_cutoff(int64_t n, double p) {
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  const double c = std::ceil(mean + 40.0 * sd + 40.0);
  return std::min<int64_t>(n, static_cast<int64_t>(c));
}

}  // namespace

double binomial_upper_tail(int64_t n, int64_t k, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(k) <= mean) {
    // Sum the shorter lower tail and complement it.
    double lower = -std::numeric_limits<double>::infinity();
    for (int64_t j = k - 1; j >= 0; --j) {
      const double t = binomial_log_pmf(n, j, p);
      lower = log_add(lower, t);
      if (t < lower - 40.0) break;
    }
    return std::max(0.0, -std::expm1(lower));
  }
  double acc = -std::numeric_limits<double>::infinity();
  for (int64_t j = k; j <= n; ++j) {
    const double t = binomial_log_pmf(n, j, p);
    acc = log_add(acc, t);
    if (t < acc - 40.0) break;
  }
  return std::exp(acc);
}

int64_t binomial_critical_value(int64_t n, double p, double alpha) {
  if (!(alpha > 0.0)) return n + 1;
  if (alpha >= 1.0) return 0;
  // Accumulate the upper tail from a cutoff where it is negligible.
  double acc = -std::numeric_limits<double>::infinity();
  const double log_alpha = std::log(alpha);
  const int64_t start = upper_cutoff(n, p);
  for (int64_t j = start; j >= 0; --j) {
    acc = log_add(acc, binomial_log_pmf(n, j, p));
    if (acc > log_alpha) return j + 1;
  }
  return 0;
}

}  // namespace seqglr
