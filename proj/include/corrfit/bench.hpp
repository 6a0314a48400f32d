#ifndef CORRFIT_BENCH_HPP
#define CORRFIT_BENCH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corrfit/dataset.hpp"
#include "corrfit/outlier.hpp"

namespace corrfit {

/// Synthetic benchmark data: y_i standard normal, sigma_i = 1, design
/// columns (1, i/N), K = 2 correlation parameters with du = 1 and
/// sensitivities uniform in [-1, 1]. Deterministic for a given seed.
Dataset synthetic_dataset(std::size_t n, std::uint64_t seed);

struct BenchRow {
  std::size_t n = 0;
  Strategy strategy = Strategy::DeltaChi2;
  double seconds = 0.0;  // fastest of the timed repetitions, one full scoring pass
  std::size_t repetitions = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::map<Strategy, double> slopes;  // least-squares slope of log(time) on log(N)
};

struct BenchOptions {
  std::vector<std::size_t> sizes;
  std::vector<Strategy> strategies;
  std::uint64_t seed = 0;
  bool refit_each_iteration = false;
  // Keep repeating a pass until this much time has been spent on it.
  double min_seconds = 0.2;
};

/// Times one full scoring pass per size and strategy. Fitting and the
/// initial inversion are setup and are not timed.
BenchResult benchmark(const BenchOptions& options);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string format_bench_table(const BenchResult& result);

}  // namespace corrfit

#endif
