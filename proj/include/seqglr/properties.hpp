#pragma once

#include <cstdint>
#include <vector>

#include "seqglr/harness.hpp"

namespace seqglr::properties {

using harness::Check;

struct SuiteOptions {
  uint64_t seed = 20220101;
  int threads = 0;
  int64_t reps = 2000;   // Monte Carlo replications per scenario
  int64_t paths = 500;   // sample paths per family for pathwise checks
};

// Printed reference values for one true mean of the testing simulations.
// NaN marks a cell the reference leaves empty.
struct ReferenceRow {
  double mu;
  double reject_phack, reject_sglr, reject_dm, reject_fixed;
  double n_sglr, n_dm, n_sprt;
  double early_sglr, early_dm, early_sprt;
};

const std::vector<ReferenceRow>& gaussian_reference();
const std::vector<ReferenceRow>& bernoulli_reference();
inline constexpr int64_t kGaussianReferenceNStar = 657;
inline constexpr int64_t kBernoulliReferenceNStar = 1645;

inline constexpr double kRejectTol = 0.03;
inline constexpr double kPhackTol = 0.04;
inline constexpr double kMeanSizeRelTol = 0.05;
inline constexpr double kEarlyStopTol = 0.04;

// Compares a simulated table with the reference rows; every cell is checked.
Check compare_with_reference(const std::string& name, const harness::AppdResult& res,
                             const std::vector<ReferenceRow>& ref, int64_t ref_n_star);

Check boundary_solver_fidelity(const SuiteOptions& opt);      // 1
Check boundary_growth_curve();                                 // 2
Check appd_gaussian_tables(const SuiteOptions& opt);          // 3
Check appd_bernoulli_tables(const SuiteOptions& opt);         // 4
Check type1_validity(const SuiteOptions& opt);                // 5
Check coverage_validity(const SuiteOptions& opt);             // 6
Check containment(const SuiteOptions& opt);                   // 7
Check stopping_time_order(const SuiteOptions& opt);           // 8
Check chernoff_match();                                       // 9
Check multistream_calibration(const SuiteOptions& opt);       // 10
Check high_probability_stopping(const SuiteOptions& opt);     // 11

// Criteria 1 to 11 in order.
std::vector<Check> acceptance_suite(const SuiteOptions& opt);

// Checks outside the numbered list: stitched log-log sum, determinism under
// different worker counts, width-ratio curve shape.
std::vector<Check> extra_properties(const SuiteOptions& opt);

}  // namespace seqglr::properties
