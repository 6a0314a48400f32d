#include "corrfit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace corrfit {

Dataset synthetic_dataset(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "synthetic dataset needs at least 3 points");
  constexpr std::size_t K = 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  Dataset ds;
  ds.delta_u.assign(K, 1.0);
  ds.jacobian = Matrix(n, K);
  for (std::size_t i = 0; i < n; ++i) {
    DataPoint p;
    p.id = "p" + std::to_string(i);
    p.y = normal(rng);
    p.sigma = 1.0;
    p.design = {1.0, static_cast<double>(i) / static_cast<double>(n)};
    for (std::size_t k = 0; k < K; ++k) ds.jacobian(i, k) = uniform(rng);
    ds.points.push_back(std::move(p));
  }
  return ds;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two points for a slope");
  const std::size_t m = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "sizes must differ");
  return sxy / sxx;
}

namespace {

template <typename Pass>
std::pair<double, std::size_t> time_pass(Pass&& pass, double min_seconds) {
  using clock = std::chrono::steady_clock;
  double best = INFINITY;
  double spent = 0.0;
  std::size_t reps = 0;
  volatile double sink = 0.0;
  do {
    const auto start = clock::now();
    const auto scores = pass();
    const double dt = std::chrono::duration<double>(clock::now() - start).count();
    if (!scores.empty()) sink = sink + scores.front().value;
    best = std::min(best, dt);
    spent += dt;
    ++reps;
  } while (spent < min_seconds || (reps < 3 && spent < 10 * min_seconds));
  return {best, reps};
}

}  // namespace

BenchResult benchmark(const BenchOptions& options) {
  if (options.sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no benchmark sizes");
  if (!std::is_sorted(options.sizes.begin(), options.sizes.end()))
    throw Error(ErrorCode::InvalidArgument, "benchmark sizes must be ascending");

  BenchResult result;
  for (std::size_t n : options.sizes) {
    const Dataset ds = synthetic_dataset(n, options.seed);
    const FitProblem problem = ds.problem();
    const CorrelationModel model = ds.model();
    const Vector residuals = gls_fit(problem).residuals;
    for (Strategy s : options.strategies) {
      const auto [seconds, reps] = time_pass(
          [&] { return score_points(s, options.refit_each_iteration, problem, model, residuals); },
          options.min_seconds);
      result.rows.push_back({n, s, seconds, reps});
    }
  }
  if (options.sizes.size() >= 2) {
    for (Strategy s : options.strategies) {
      std::vector<double> xs, ts;
      for (const auto& row : result.rows) {
        if (row.strategy != s) continue;
        xs.push_back(static_cast<double>(row.n));
        ts.push_back(std::max(row.seconds, 1e-9));
      }
      result.slopes[s] = log_log_slope(xs, ts);
    }
  }
  return result;
}

std::string format_bench_table(const BenchResult& result) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %8s %14s %6s\n", "strategy", "N", "seconds", "reps");
  out += line;
  for (const auto& row : result.rows) {
    std::snprintf(line, sizeof line, "%-12s %8zu %14.6e %6zu\n", std::string(to_string(row.strategy)).c_str(), row.n,
                  row.seconds, row.repetitions);
    out += line;
  }
  for (const auto& [strategy, slope] : result.slopes) {
    std::snprintf(line, sizeof line, "slope %-12s %6.3f\n", std::string(to_string(strategy)).c_str(), slope);
    out += line;
  }
  return out;
}

}  // namespace corrfit
