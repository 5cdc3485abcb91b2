#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "seqglr/sequential_tests.hpp"

namespace seqglr::harness {

// ---------------------------------------------------------------- config

using Config = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment. Duplicate keys and
// malformed lines raise ConfigError.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);
// Raises ConfigError naming the first key not in `allowed`.
void check_keys(const Config& cfg, const std::vector<std::string>& allowed);

double get_double(const Config& cfg, const std::string& key, double fallback);
int64_t get_int(const Config& cfg, const std::string& key, int64_t fallback);
std::string get_string(const Config& cfg, const std::string& key, const std::string& fallback);
std::vector<double> get_list(const Config& cfg, const std::string& key,
                             const std::vector<double>& fallback);

// ------------------------------------------------------------------ runs

struct RunOptions {
  uint64_t seed = 20220101;
  int threads = 0;  // 0 picks hardware_concurrency
};

int resolve_threads(int requested);

// Evaluates fn(i) for i in [0, count) across worker threads and returns the
// results in index order, so reductions do not depend on scheduling.
template <class T, class F>
std::vector<T> parallel_map(int64_t count, int threads, F&& fn) {
  std::vector<T> out(static_cast<std::size_t>(std::max<int64_t>(count, 0)));
  const int workers = static_cast<int>(std::min<int64_t>(resolve_threads(threads), std::max<int64_t>(count, 1)));
  std::atomic<int64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (;;) {
      const int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

// ------------------------------------------------------------------- csv

struct Table {
  std::string scenario;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline constexpr int kCsvVersion = 1;

// "# seqglr <scenario> v1" comment, header, rows; LF endings.
std::string to_csv(const Table& t);
// Fixed-point text with "." as the decimal mark, independent of locale.
std::string fmt(double v, int digits = 6);
// Scientific notation with `digits` after the point, same locale rules.
std::string fmt_sci(double v, int digits = 10);

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

// ------------------------------------------------------------- scenarios

struct Fig3Spec {
  double alpha = 0.025;
  double sigma = 1.0;
  int log10_min = 1;
  int log10_max = 10;
  int points_per_decade = 4;
};

struct Fig3Row {
  double inv_gap;
  double d1;
  double g_lorden;
  double g_ours;
  double bound_ours;
};

struct Fig3Result {
  std::vector<Fig3Row> rows;
  std::vector<Check> checks;
  Table table() const;
};

Fig3Result run_fig3(const Fig3Spec& spec);

struct Fig5Spec {
  double alpha = 0.025;
  double sigma = 1.0;
  double rho = 1260.0;
  int points_per_decade = 8;
  int log10_n_max = 6;
  int64_t w1_min = 1, w1_max = 100000;
  int64_t w2_min = 5000, w2_max = 400000;
};

struct Fig5Row {
  int64_t n;
  std::string method;
  double ratio;
};

struct Fig5Result {
  double g1, g2;  // GLR-like levels for the two windows
  std::vector<Fig5Row> rows;
  std::vector<Check> checks;
  Table table() const;
};

Fig5Result run_fig5(const Fig5Spec& spec);

enum class PhackHorizon { NStar, TwoNStar };

struct AppdSpec {
  bool bernoulli = false;
  double alpha = 0.1;
  double beta = 0.1;
  double mu0 = 0.0;
  double mu1 = 0.1;
  double sigma = 1.0;
  std::vector<double> mus;
  int64_t reps = 2000;
  PhackHorizon phack = PhackHorizon::TwoNStar;
  // Fixed-test sample size; 0 derives it from alpha, beta and the means.
  int64_t n_star = 0;
};

AppdSpec appd_defaults(bool bernoulli);

struct MethodRow {
  double mu;
  std::string method;
  double reject_rate;
  double mean_n;
  double early_stop;
};

struct AppdResult {
  TestDesign design;
  double g;
  int64_t horizon;
  std::vector<MethodRow> rows;
  const MethodRow* find(double mu, const std::string& method) const;
  Table table(const std::string& scenario) const;
};

AppdResult run_appd(const AppdSpec& spec, const RunOptions& opt);

struct MultiStreamSpec {
  double alpha = 0.05;
  int K = 2;
  int64_t mc_reps = 200000;
  double c = 2.0;
  int64_t horizon = 10000;
  int64_t reps = 2000;
};

struct MultiStreamResult {
  CalibrationResult cal;
  double closed_form_epsilon;  // root of (eps/K)^K e^{K-eps} = alpha
  double crossing_rate;
  double crossing_se;
  Table table() const;
  std::vector<Check> checks;
};

MultiStreamResult run_multistream(const MultiStreamSpec& spec, const RunOptions& opt);

struct CoverageSpec {
  double alpha = 0.05;
  int64_t horizon = 10000;
  int64_t reps = 2000;
  int64_t n_min = 10;
  int64_t n_max = 10000;
  double gaussian_mu = 0.0;
  double bernoulli_mu = 0.5;
};

struct CoverageRow {
  std::string family;
  std::string mode;
  double mu_true;
  double coverage;
  double se;
};

struct CoverageResult {
  std::vector<CoverageRow> rows;
  std::vector<Check> checks;
  Table table(int64_t reps, int64_t horizon) const;
};

CoverageResult run_coverage(const CoverageSpec& spec, const RunOptions& opt);

}  // namespace seqglr::harness
