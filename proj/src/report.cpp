#include "corrfit/report.hpp"

#include <charconv>
#include <cmath>
#include <regex>

#include <json.hpp>

namespace corrfit {

using Json = nlohmann::ordered_json;

EliminationConfig RunConfig::elimination() const {
  EliminationConfig c;
  c.d_max = d_max;
  c.strategy = strategy;
  c.refit_each_iteration = refit_each_iteration;
  c.max_removals = max_removals;
  return c;
}

namespace {

std::string with_ids(const std::string& message, const Dataset& dataset) {
  static const std::regex point_ref(R"(point (\d+))");
  std::string out;
  auto it = std::sregex_iterator(message.begin(), message.end(), point_ref);
  std::size_t last = 0;
  for (; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(message, last, static_cast<std::size_t>(m.position()) - last);
    const std::size_t index = std::stoul(m[1].str());
    if (index < dataset.size())
      out += "point '" + dataset.points[index].id + "'";
    else
      out += m.str();
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  out.append(message, last);
  return out;
}

Json fit_json(const FitResult& fit) {
  Json j;
  j["parameters"] = fit.parameters;
  j["chi2"] = fit.chi2;
  j["dof"] = fit.dof;
  j["residuals"] = fit.residuals;
  Json cov = Json::array();
  const std::size_t P = fit.parameter_covariance.size();
  for (std::size_t a = 0; a < P; ++a) {
    const auto row = fit.parameter_covariance.row(a);
    cov.push_back(Vector(row.begin(), row.end()));
  }
  j["parameter_covariance"] = std::move(cov);
  return j;
}

void dump(const Json& j, std::string& out, int indent, int depth) {
  const auto newline = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += ": ";
        dump(value, out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = !j.front().is_structured();
      out += '[';
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump(value, out, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: out += format_real(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace

std::string format_real(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

EliminationReport run_fit(const Dataset& dataset, const RunConfig& config) {
  try {
    return eliminate(dataset.problem(), dataset.model(), config.elimination());
  } catch (const Error& e) {
    // what() already carries the code prefix.
    const std::string message = e.what();
    const auto colon = message.find(": ");
    throw Error(e.code(), with_ids(colon == std::string::npos ? message : message.substr(colon + 2), dataset));
  }
}

std::string serialize_report(const EliminationReport& report, const Dataset& dataset) {
  const auto id = [&](std::size_t i) { return dataset.points.at(i).id; };

  Json config;
  config["strategy"] = std::string(to_string(report.config.strategy));
  config["d_max"] = report.config.d_max;
  config["refit_each_iteration"] = report.config.refit_each_iteration;
  if (report.config.max_removals == std::numeric_limits<std::size_t>::max())
    config["max_removals"] = nullptr;
  else
    config["max_removals"] = report.config.max_removals;
  config["min_surviving"] = report.config.min_surviving.value_or(dataset.parameters());

  Json iterations = Json::array();
  for (const auto& step : report.iterations) {
    Json s;
    s["point"] = id(step.point);
    s["index"] = step.point;
    s["score"] = step.score;
    s["chi2_before"] = step.chi2_before;
    s["chi2_after"] = step.chi2_after;
    iterations.push_back(std::move(s));
  }

  Json surviving = Json::array();
  for (auto i : report.surviving) surviving.push_back(id(i));

  Json scores = Json::array();
  for (const auto& s : report.scores_final) {
    Json e;
    e["point"] = id(s.point);
    e["index"] = s.point;
    e["value"] = s.value;
    scores.push_back(std::move(e));
  }

  Json doc;
  doc["config"] = std::move(config);
  doc["initial_fit"] = fit_json(report.initial_fit);
  doc["iterations"] = std::move(iterations);
  doc["final_fit"] = fit_json(report.final_fit);
  doc["surviving"] = std::move(surviving);
  doc["scores_final"] = std::move(scores);
  doc["termination"] = std::string(to_string(report.termination));

  std::string out;
  dump(doc, out, 2, 0);
  out += '\n';
  return out;
}

}  // namespace corrfit
