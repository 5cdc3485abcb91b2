#include <algorithm>
#include <cmath>
#include <limits>

#include "kernels_impl.hpp"

namespace seqglr::kernels::detail {

ScanResult scan_scalar(double g, double log_r, int64_t k_lo, int64_t k_hi, int patience) {
  ScanResult best{std::numeric_limits<double>::infinity(), k_lo};
  double prev = std::numeric_limits<double>::infinity();
  int rising = 0;
  for (int64_t k = k_lo; k <= k_hi; ++k) {
    const double kd = static_cast<double>(k);
    const double v = std::log(kd) - g * std::exp(log_r / kd);
    if (v < best.log_value) best = {v, k};
    rising = v > prev ? rising + 1 : 0;
    if (patience > 0 && rising >= patience) break;
    prev = v;
  }
  return best;
}

double mixture_scalar(const double* logw, const double* d, const double* l, const double* z,
                      std::size_t count, double n, double xbar) {
  if (count == 0) return -std::numeric_limits<double>::infinity();
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    top = std::max(top, logw[k] + n * (d[k] + l[k] * (xbar - z[k])));
  }
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    acc += std::exp(logw[k] + n * (d[k] + l[k] * (xbar - z[k])) - top);
  }
  return top + std::log(acc);
}

double max_scalar(const double* logw, const double* d, const double* l, const double* z,
                  std::size_t count, double n, double xbar) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    top = std::max(top, logw[k] + n * (d[k] + l[k] * (xbar - z[k])));
  }
  return top;
}

}  // namespace seqglr::kernels::detail
