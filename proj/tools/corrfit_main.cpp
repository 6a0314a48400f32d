// corrfit: GLS fit with correlated uncertainties and outlier elimination.
//
//   corrfit fit points.csv [--correlations corr.csv] [--strategy delta-chi2]
//               [--dmax 3] [--refit-each] [--max-removals n] [--out report.json]
//   corrfit bench --sizes 64,128,256,512 --seed 1 [--strategies delta-chi2,downdate]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrfit/bench.hpp"
#include "corrfit/dataset.hpp"
#include "corrfit/report.hpp"

namespace {

int run_fit_command(const std::string& points, const std::optional<std::string>& correlations,
                    const corrfit::RunConfig& config, const std::optional<std::string>& out_path) {
  std::optional<std::filesystem::path> corr;
  if (correlations) corr = *correlations;
  const auto dataset = corrfit::load_dataset(points, corr);
  const auto report = corrfit::run_fit(dataset, config);
  const std::string text = corrfit::serialize_report(report, dataset);
  if (out_path) {
    std::ofstream out(*out_path, std::ios::binary);
    if (!out) {
      std::cerr << "corrfit: cannot write " << *out_path << "\n";
      return 1;
    }
    out << text;
  } else {
    std::cout << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized least squares with correlated uncertainties and outlier elimination"};
  app.require_subcommand(1);

  std::string points;
  std::optional<std::string> correlations;
  std::optional<std::string> out_path;
  std::string strategy_name = "delta-chi2";
  corrfit::RunConfig config;
  std::optional<std::size_t> max_removals;

  auto* fit = app.add_subcommand("fit", "Fit a dataset and eliminate outliers");
  fit->add_option("points", points, "Points file (id,y,sigma,x0..)")->required()->check(CLI::ExistingFile);
  fit->add_option("--correlations", correlations, "Correlation file (du row, then sensitivities)")
      ->check(CLI::ExistingFile);
  fit->add_option("--strategy", strategy_name, "naive|brute-force|downdate|delta-chi2")
      ->check(CLI::IsMember({"naive", "brute-force", "downdate", "delta-chi2"}));
  fit->add_option("--dmax", config.d_max, "Outlier threshold on D")->check(CLI::PositiveNumber);
  fit->add_flag("--refit-each", config.refit_each_iteration, "Refit after every removal");
  fit->add_option("--max-removals", max_removals, "Stop after this many removals");
  fit->add_option("--out", out_path, "Write the JSON report here instead of stdout");

  std::vector<std::size_t> sizes{64, 128, 256, 512};
  std::vector<std::string> strategy_names{"naive", "delta-chi2", "downdate", "brute-force"};
  std::uint64_t seed = 1;
  double min_seconds = 0.2;
  bool bench_refit = false;
  auto* bench = app.add_subcommand("bench", "Time one full scoring pass per strategy and size");
  bench->add_option("--sizes", sizes, "Ascending point counts")->delimiter(',');
  bench->add_option("--seed", seed, "Generator seed");
  bench->add_option("--strategies", strategy_names, "Strategies to time")
      ->delimiter(',')
      ->check(CLI::IsMember({"naive", "brute-force", "downdate", "delta-chi2"}));
  bench->add_option("--min-seconds", min_seconds, "Minimum time spent per measurement");
  bench->add_flag("--refit-each", bench_refit, "Time the refitting variant of the downdate strategy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      config.strategy = corrfit::parse_strategy(strategy_name);
      if (max_removals) config.max_removals = *max_removals;
      return run_fit_command(points, correlations, config, out_path);
    }
    corrfit::BenchOptions options;
    options.sizes = sizes;
    options.seed = seed;
    options.min_seconds = min_seconds;
    options.refit_each_iteration = bench_refit;
    for (const auto& name : strategy_names) options.strategies.push_back(corrfit::parse_strategy(name));
    std::cout << corrfit::format_bench_table(corrfit::benchmark(options));
    return 0;
  } catch (const corrfit::Error& e) {
    std::cerr << "corrfit: " << e.what() << "\n";
    return 2;
  }
}
