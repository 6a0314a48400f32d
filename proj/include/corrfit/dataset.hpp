#ifndef CORRFIT_DATASET_HPP
#define CORRFIT_DATASET_HPP

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "corrfit/covariance.hpp"
#include "corrfit/fit.hpp"

namespace corrfit {

struct DataPoint {
  std::string id;
  double y = 0.0;
  double sigma = 1.0;
  Vector design;  // one row of X, length P
};

struct Dataset {
  std::vector<DataPoint> points;
  Matrix jacobian;  // N x K, K may be 0
  Vector delta_u;   // K

  std::size_t size() const noexcept { return points.size(); }
  std::size_t parameters() const noexcept { return points.empty() ? 0 : points.front().design.size(); }

  CorrelationModel model() const;
  /// Design, observations and the full inverse covariance.
  FitProblem problem() const;
  /// Dataset restricted to the given point indices.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

// Points file: header "id,y,sigma,x0,...,x{P-1}", one point per line.
// Correlations file: first row "du,<du_1>,...,<du_K>", then one row of
// K sensitivities per point, in points-file order.
// Blank lines are skipped; line numbers in errors are 1-based.
Dataset parse_points(std::istream& in, const std::string& source = "<points>");
void attach_correlations(Dataset& dataset, std::istream& in, const std::string& source = "<correlations>");

/// Throws ParseError, ValidationError or DimensionMismatch.
Dataset load_dataset(const std::filesystem::path& points,
                     const std::optional<std::filesystem::path>& correlations = std::nullopt);

}  // namespace corrfit

#endif
