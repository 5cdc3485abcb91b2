#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "seqglr/boundaries.hpp"
#include "seqglr/confidence_sequences.hpp"
#include "seqglr/psi_family.hpp"

namespace seqglr {

// Rejects once log_glr_like(n, mean, mu1, mu0) >= g.
struct SglrConstRule {
  double mu0;
  double mu1;
  double g;
};

// Rejects once mean >= mu0 and n D(mean, mu0) >= loglog_boundary(c, alpha, n).
struct SglrNoSepRule {
  double mu0;
  double c;
  double alpha;
};

// Simple-vs-simple likelihood ratio against mu_alt with threshold A.
struct SprtRule {
  double mu0;
  double mu_alt;
  double threshold;
};

// GLR-like test with a general boundary g(n), active from n_start on.
struct GlrBoundaryRule {
  double mu0;
  double mu1;
  Boundary boundary;
  int64_t n_start = 1;
};

// Weighted lines compared against a threshold on the log scale, either
// through their maximum or through their sum.
struct LinesRule {
  LineSet lines;
  double log_threshold = 0.0;
  bool use_sum = true;
};

// Rejects mu0 once it leaves a GLR-like or discrete-mixture confidence set.
struct CsRule {
  std::shared_ptr<const NullGeometry> geometry;
};

using Rule = std::variant<SglrConstRule, SglrNoSepRule, SprtRule, GlrBoundaryRule, LinesRule, CsRule>;

enum class Status { Running, Rejected };

// O(1)-memory online test. The mean is kept as (count, sum).
class TestState {
 public:
  TestState(PsiFamily family, Rule rule);

  Status step(double x);

  int64_t n() const { return n_; }
  double sum() const { return sum_; }
  double mean() const { return n_ == 0 ? 0.0 : sum_ / static_cast<double>(n_); }
  Status status() const { return status_; }
  // Zero while running.
  int64_t rejected_at() const { return rejected_at_; }
  const Rule& rule() const { return rule_; }
  const PsiFamily& family() const { return family_; }

 private:
  bool crossed() const;

  PsiFamily family_;
  Rule rule_;
  int64_t n_ = 0;
  double sum_ = 0.0;
  Status status_ = Status::Running;
  int64_t rejected_at_ = 0;
  // Cached SPRT coefficients: n (lambda xbar - psi_{mu0}(lambda)).
  double sprt_lambda_ = 0.0;
  double sprt_psi_ = 0.0;
};

TestState make_sglr_const(const PsiFamily& fam, double mu0, double mu1, double alpha);
TestState make_sglr_noseq(const PsiFamily& fam, double mu0, double c, double alpha);
TestState make_sprt_oracle(const PsiFamily& fam, double mu0, double mu_true, double alpha);

// Thin wrappers that also check the rule kind.
Status sglr_const_step(TestState& state, double x);
Status sglr_noseq_step(TestState& state, double x);
Status sprt_oracle_step(TestState& state, double x);

// Lines {z_k, h_k} from the lines-crossing lemma for a GLR-like test with
// boundary g(n) started at n_start. Infinite K is truncated once
// n_bar eta^{k-1} exceeds horizon.
LineSet lemma_lines(const PsiFamily& fam, const Boundary& boundary, double mu0, double mu1,
                    double eta, int64_t n_start, int64_t horizon);

struct TestDesign {
  int64_t n_star;
  int64_t n_min;
  int64_t n_max;
};

int64_t fixed_sample_size_gaussian(double alpha, double beta, double mu0, double mu1,
                                   double sigma);
int64_t fixed_sample_size_binomial(double alpha, double beta, double mu0, double mu1);
TestDesign design_test_from_power(const PsiFamily& fam, double alpha, double beta, double mu0,
                                  double mu1);

struct MultiStreamCal {
  int K = 1;
  std::vector<std::function<double(double)>> h_funcs;
  // Set when every h is log(1/u), which enables the closed-form bound.
  bool log_inverse = false;
  int64_t mc_reps = 100000;
  uint64_t seed = 1;
  double eps_step = 1e-3;
  double eps_max = 200.0;
};

std::function<double(double)> log_inverse_h();
MultiStreamCal log_inverse_cal(int K, int64_t mc_reps, uint64_t seed);

struct CalibrationResult {
  double epsilon;
  double mc_tail;           // estimated P(sum h(U) >= epsilon)
  double mc_se;
  double closed_form_bound;  // (eps/K)^K e^{K - eps} when applicable, else NaN
};

CalibrationResult calibrate_multistream(const MultiStreamCal& cal, double target_alpha);
// (eps/K)^K exp(K - eps), capped at 1; valid for eps >= K.
double multistream_tail_bound(int K, double eps);

}  // namespace seqglr
