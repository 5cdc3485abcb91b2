#pragma once

#include <cstdint>

namespace seqglr {

double normal_cdf(double x);
// Upper-tail quantile: P(Z >= z_upper(p)) = p.
double normal_quantile(double p);
inline double z_upper(double p) { return normal_quantile(1.0 - p); }

double binomial_log_pmf(int64_t n, int64_t k, double p);
// P(S >= k) for S ~ Binomial(n, p); k <= 0 gives 1, k > n gives 0.
double binomial_upper_tail(int64_t n, int64_t k, double p);
// Smallest k in [0, n + 1] with P_p(S >= k) <= alpha.
int64_t binomial_critical_value(int64_t n, double p, double alpha);

}  // namespace seqglr
