#pragma once

#include "seqglr/kernels.hpp"

namespace seqglr::kernels::detail {

ScanResult scan_scalar(double g, double log_r, int64_t k_lo, int64_t k_hi, int patience);
double mixture_scalar(const double* logw, const double* d, const double* l, const double* z,
                      std::size_t count, double n, double xbar);
double max_scalar(const double* logw, const double* d, const double* l, const double* z,
                  std::size_t count, double n, double xbar);

#if defined(__x86_64__) || defined(_M_X64)
#define SEQGLR_HAVE_AVX2_TU 1
ScanResult scan_avx2(double g, double log_r, int64_t k_lo, int64_t k_hi, int patience);
double mixture_avx2(const double* logw, const double* d, const double* l, const double* z,
                    std::size_t count, double n, double xbar);
double max_avx2(const double* logw, const double* d, const double* l, const double* z,
                std::size_t count, double n, double xbar);
#endif

}  // namespace seqglr::kernels::detail
