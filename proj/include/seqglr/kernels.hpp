#pragma once

#include <cstddef>
#include <cstdint>

// Inner loops that dominate long simulations. Every kernel has a scalar
// reference version and, on x86-64, an AVX2+FMA version picked at runtime.
// Set SEQGLR_KERNELS=scalar in the environment to pin the reference path.
namespace seqglr::kernels {

enum class Isa { Scalar, Avx2 };

struct ScanResult {
  double log_value;  // log of the minimum of k exp(-g r^{1/k})
  int64_t k;         // smallest minimiser
};

// Minimises log k - g exp(log_r / k) over k in [k_lo, k_hi]. With
// patience > 0 the scan stops after that many consecutive increases.
using ScanFn = ScanResult (*)(double g, double log_r, int64_t k_lo, int64_t k_hi, int patience);

// log sum_k exp(logw[k] + n (d[k] + l[k] (xbar - z[k]))).
using LinesFn = double (*)(const double* logw, const double* d, const double* l, const double* z,
                           std::size_t count, double n, double xbar);

struct Table {
  Isa isa;
  const char* name;
  ScanFn integer_min_scan;
  LinesFn mixture_log_sum;
  LinesFn lines_log_max;
};

const Table& scalar_table();
// Null when the binary or the CPU lacks AVX2/FMA.
const Table* avx2_table();
bool avx2_available();

// The table used by the library. Chosen once from CPU features and the
// environment; tests may override it.
const Table& active();
void set_active(Isa isa);

}  // namespace seqglr::kernels
