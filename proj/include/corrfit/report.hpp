#ifndef CORRFIT_REPORT_HPP
#define CORRFIT_REPORT_HPP

#include <cstdint>
#include <limits>
#include <string>

#include "corrfit/dataset.hpp"
#include "corrfit/outlier.hpp"

namespace corrfit {

struct RunConfig {
  Strategy strategy = Strategy::DeltaChi2;
  double d_max = 3.0;
  bool refit_each_iteration = false;
  std::size_t max_removals = std::numeric_limits<std::size_t>::max();
  std::uint64_t seed = 0;

  EliminationConfig elimination() const;
};

/// Fits the dataset and eliminates outliers. Errors are rethrown with point
/// indices replaced by the dataset ids.
EliminationReport run_fit(const Dataset& dataset, const RunConfig& config);

/// JSON object with keys config, initial_fit, iterations, final_fit,
/// surviving, scores_final and termination. Points are named by id; reals
/// carry 17 significant digits.
std::string serialize_report(const EliminationReport& report, const Dataset& dataset);

/// printf("%.17g")-equivalent text, independent of the global locale.
std::string format_real(double value);

}  // namespace corrfit

#endif
