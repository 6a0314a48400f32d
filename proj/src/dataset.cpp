#include "corrfit/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <unordered_set>

namespace corrfit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

// std::from_chars ignores the global locale, so '.' is always the separator.
double parse_real(std::string_view field, const std::string& source, std::size_t line, std::string_view column) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorCode::ParseError, where(source, line) + "column '" + std::string(column) +
                                           "': cannot parse '" + std::string(field) + "' as a real number");
  }
  return value;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

CorrelationModel Dataset::model() const {
  CorrelationModel m{Vector(size()), jacobian, delta_u};
  for (std::size_t i = 0; i < size(); ++i) m.sigma[i] = points[i].sigma;
  if (m.jacobian.rows() == 0 && m.delta_u.empty()) m.jacobian = Matrix(size(), 0);
  return m;
}

FitProblem Dataset::problem() const {
  const std::size_t n = size();
  const std::size_t P = parameters();
  Matrix design(n, P);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < P; ++a) design(i, a) = points[i].design[a];
    y[i] = points[i].y;
  }
  return FitProblem{std::move(design), std::move(y), invert(assemble_covariance(model()))};
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.delta_u = delta_u;
  out.jacobian = Matrix(indices.size(), delta_u.size());
  for (std::size_t a = 0; a < indices.size(); ++a) {
    out.points.push_back(points.at(indices[a]));
    for (std::size_t k = 0; k < delta_u.size(); ++k) out.jacobian(a, k) = jacobian(indices[a], k);
  }
  return out;
}

Dataset parse_points(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    header_line = line;
    header = split_fields(header_line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, source + ": empty points file");
  if (header.size() < 4 || header[0] != "id" || header[1] != "y" || header[2] != "sigma") {
    throw Error(ErrorCode::ParseError, where(source, lineno) + "header must be 'id,y,sigma,x0[,x1...]'");
  }
  const std::size_t P = header.size() - 3;
  for (std::size_t a = 0; a < P; ++a) {
    if (header[3 + a] != "x" + std::to_string(a)) {
      throw Error(ErrorCode::ParseError, where(source, lineno) + "expected column 'x" + std::to_string(a) +
                                             "', found '" + std::string(header[3 + a]) + "'");
    }
  }

  Dataset ds;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ValidationError, where(source, lineno) + "expected " + std::to_string(header.size()) +
                                                  " fields, found " + std::to_string(fields.size()));
    }
    DataPoint p;
    p.id = std::string(fields[0]);
    if (p.id.empty()) throw Error(ErrorCode::ValidationError, where(source, lineno) + "empty id");
    if (!seen.insert(p.id).second)
      throw Error(ErrorCode::ValidationError, where(source, lineno) + "duplicate id '" + p.id + "'");
    p.y = parse_real(fields[1], source, lineno, "y");
    p.sigma = parse_real(fields[2], source, lineno, "sigma");
    if (!(p.sigma > 0.0)) {
      throw Error(ErrorCode::ValidationError,
                  where(source, lineno) + "sigma of point '" + p.id + "' must be positive");
    }
    p.design.reserve(P);
    for (std::size_t a = 0; a < P; ++a) p.design.push_back(parse_real(fields[3 + a], source, lineno, header[3 + a]));
    ds.points.push_back(std::move(p));
  }
  if (ds.points.empty()) throw Error(ErrorCode::ValidationError, source + ": no data points");
  ds.jacobian = Matrix(ds.size(), 0);
  return ds;
}

void attach_correlations(Dataset& dataset, std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  Vector delta_u;
  bool have_header = false;
  std::vector<Vector> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.empty() || fields[0] != "du")
        throw Error(ErrorCode::ParseError, where(source, lineno) + "first row must start with 'du'");
      for (std::size_t k = 1; k < fields.size(); ++k) {
        const double du = parse_real(fields[k], source, lineno, "du" + std::to_string(k));
        if (du < 0.0) throw Error(ErrorCode::ValidationError, where(source, lineno) + "negative du");
        delta_u.push_back(du);
      }
      if (delta_u.empty()) throw Error(ErrorCode::ValidationError, where(source, lineno) + "no correlation parameters");
      have_header = true;
      continue;
    }
    if (fields.size() != delta_u.size()) {
      throw Error(ErrorCode::ValidationError, where(source, lineno) + "expected " + std::to_string(delta_u.size()) +
                                                  " sensitivities, found " + std::to_string(fields.size()));
    }
    Vector row;
    for (std::size_t k = 0; k < fields.size(); ++k)
      row.push_back(parse_real(fields[k], source, lineno, "J" + std::to_string(k)));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorCode::ParseError, source + ": empty correlations file");
  if (rows.size() != dataset.size()) {
    throw Error(ErrorCode::DimensionMismatch, source + ": " + std::to_string(rows.size()) +
                                                  " sensitivity rows for " + std::to_string(dataset.size()) + " points");
  }
  Matrix J(rows.size(), delta_u.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < delta_u.size(); ++k) J(i, k) = rows[i][k];
  dataset.jacobian = std::move(J);
  dataset.delta_u = std::move(delta_u);
}

Dataset load_dataset(const std::filesystem::path& points, const std::optional<std::filesystem::path>& correlations) {
  std::ifstream in(points);
  if (!in) throw Error(ErrorCode::ParseError, points.string() + ": cannot open");
  Dataset ds = parse_points(in, points.string());
  if (correlations) {
    std::ifstream cin(*correlations);
    if (!cin) throw Error(ErrorCode::ParseError, correlations->string() + ": cannot open");
    attach_correlations(ds, cin, correlations->string());
  }
  return ds;
}

}  // namespace corrfit
