#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace seqglr {

inline constexpr double kMeanTol = 1e-10;
inline constexpr double kBoundaryTol = 1e-8;
inline constexpr int kMaxBisect = 200;

// Bisection on a monotone predicate: `pred(lo)` is false and `pred(hi)` is
// true. Returns the final bracket so callers can pick the side they need.
struct Bracket {
  double lo;
  double hi;
};

template <class Pred>
Bracket bisect_predicate(double lo, double hi, Pred&& pred, double tol = kMeanTol,
                         int max_iter = kMaxBisect) {
  for (int it = 0; it < max_iter; ++it) {
    if (hi - lo <= tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi};
}

// Root of an increasing function f on [lo, hi] with f(lo) <= 0 <= f(hi).
// Keeps halving past `tol` until the bracket stops moving, so results are
// as tight as double precision allows when tol is 0.
template <class F>
double bisect_increasing(double lo, double hi, F&& f, double tol = 0.0,
                         int max_iter = kMaxBisect) {
  const Bracket b = bisect_predicate(lo, hi, [&](double x) { return f(x) >= 0.0; }, tol,
                                     max_iter);
  return 0.5 * (b.lo + b.hi);
}

// Root of an increasing f on [lo, hi] with f(lo) < 0 <= f(hi), using Newton
// steps from x0 that fall back to bisection whenever a step leaves the
// current bracket.
template <class F, class G>
double newton_bracketed(double lo, double hi, double x0, F&& f, G&& fprime,
                        int max_iter = kMaxBisect) {
  double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double slope = fprime(x);
    double next = x - fx / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = mid;
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      // Converged; nudge onto the side where f >= 0 when that is a few ulps away.
      double r = next;
      for (int i = 0; i < 8 && f(r) < 0.0 && r < hi; ++i) r = std::nextafter(r, hi);
      return f(r) >= 0.0 ? r : next;
    }
    x = next;
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimisation of a unimodal function on [a, b].
template <class F>
double golden_min(double a, double b, F&& f, int iters = 80) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace seqglr
