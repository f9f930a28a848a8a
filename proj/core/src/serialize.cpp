#include "passk/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifndef PASSK_VERSION
#define PASSK_VERSION "0.0.0"
#endif

namespace passk {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json provenance_json(const Provenance& p) {
  ordered_json j;
  j["tool"] = "passk";
  j["version"] = tool_version();
  j["command"] = p.command;
  j["seed"] = p.seed;
  return j;
}

// NaN and infinities are not JSON numbers; store null instead.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void csv_header(std::ostringstream& os, const Provenance& p) {
  os << "# passk " << tool_version() << "\n";
  os << "# command: " << p.command << "\n";
  os << "# seed: " << p.seed << "\n";
}

ordered_json parse(std::string_view text) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string tool_version() { return PASSK_VERSION; }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string to_json(const BetaParams& params, const Provenance& provenance) {
  ordered_json j;
  j["method"] = params.method;
  j["alpha"] = params.alpha;
  j["beta"] = params.beta;
  j["theta"] = params.theta;
  j["log_likelihood"] = number(params.log_likelihood);
  j["converged"] = params.converged;
  j["boundary_hit"] = params.boundary_hit;
  j["provenance"] = provenance_json(provenance);
  return dump(j);
}

std::string to_json(const PowerLawFit& fit, const Provenance& provenance) {
  ordered_json j;
  j["method"] = "loglog-regression";
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["k_min"] = fit.k_min;
  j["k_max"] = fit.k_max;
  j["residual_sum_squares"] = fit.residual_sum_squares;
  j["points_used"] = fit.points_used;
  j["zeros_excluded"] = fit.zeros_excluded;
  j["provenance"] = provenance_json(provenance);
  return dump(j);
}

std::string to_json(const PassCurve& curve, const Provenance& provenance) {
  ordered_json j;
  j["method"] = curve.method;
  j["budget"] = curve.budget;
  j["seed"] = curve.seed;
  auto& pts = j["points"] = ordered_json::array();
  for (const auto& p : curve.points) pts.push_back({{"k", p.k}, {"value", number(p.value)}});
  j["provenance"] = provenance_json(provenance);
  return dump(j);
}

std::string to_json(const IntervalEstimate& interval, const Provenance& provenance) {
  ordered_json j;
  j["point"] = interval.point;
  j["lower"] = interval.lower;
  j["upper"] = interval.upper;
  j["level"] = interval.level;
  j["resamples"] = interval.resamples;
  j["failures"] = interval.failures;
  j["provenance"] = provenance_json(provenance);
  return dump(j);
}

std::string to_json(const ValidationReport& report, const Provenance& provenance) {
  ordered_json j;
  j["valid"] = report.ok();
  j["problems"] = report.problems;
  j["min_attempts"] = report.min_attempts;
  j["max_attempts"] = report.max_attempts;
  j["total_attempts"] = report.total_attempts;
  j["zero_success_problems"] = report.zero_success_problems;
  j["violations"] = report.violations;
  j["provenance"] = provenance_json(provenance);
  return dump(j);
}

std::string to_json(const SimulationResult& result, std::string_view method, std::int64_t budget, std::int64_t k,
                    const Provenance& provenance) {
  ordered_json j;
  j["method"] = std::string(method);
  j["budget"] = budget;
  j["k"] = k;
  j["problems"] = result.difficulties.size();
  j["prediction"] = result.prediction;
  j["truth"] = result.truth;
  j["squared_error"] = result.squared_error;
  j["provenance"] = provenance_json(provenance);
  return dump(j);
}

std::string fit_method_from_json(std::string_view text) {
  const auto j = parse(text);
  if (!j.is_object() || !j.contains("method") || !j["method"].is_string()) {
    throw std::invalid_argument("fit file: missing \"method\"");
  }
  return j["method"].get<std::string>();
}

BetaParams beta_params_from_json(std::string_view text) {
  const auto j = parse(text);
  BetaParams p;
  try {
    p.method = j.value("method", std::string("beta-binomial"));
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.theta = j.value("theta", 1.0);
    p.log_likelihood = j.contains("log_likelihood") && j["log_likelihood"].is_number() ? j["log_likelihood"].get<double>() : 0.0;
    p.converged = j.value("converged", false);
    p.boundary_hit = j.value("boundary_hit", false);
  } catch (const ordered_json::exception& e) {
    throw std::invalid_argument(std::string("fit file: ") + e.what());
  }
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !(p.theta > 0.0 && p.theta <= 1.0)) {
    throw std::invalid_argument("fit file: parameters out of range");
  }
  return p;
}

PowerLawFit power_law_fit_from_json(std::string_view text) {
  const auto j = parse(text);
  PowerLawFit fit;
  try {
    fit.slope = j.at("slope").get<double>();
    fit.intercept = j.at("intercept").get<double>();
    fit.k_min = j.value("k_min", std::int64_t{0});
    fit.k_max = j.value("k_max", std::int64_t{0});
    fit.residual_sum_squares = j.value("residual_sum_squares", 0.0);
    fit.points_used = j.value("points_used", std::size_t{0});
    fit.zeros_excluded = j.value("zeros_excluded", std::size_t{0});
  } catch (const ordered_json::exception& e) {
    throw std::invalid_argument(std::string("fit file: ") + e.what());
  }
  return fit;
}

std::string to_csv(const EvalGrid& grid, const Provenance& provenance) {
  std::ostringstream os;
  csv_header(os, provenance);
  os << "# problems: " << grid.problems << "\n";
  os << "budget,k,method,prediction,truth,squared_error,seed,error_note\n";
  for (const auto& c : grid.cells) {
    os << c.budget << ',' << c.k << ',' << csv_field(c.method) << ',';
    if (c.ok()) {
      os << format_double(c.prediction) << ',' << format_double(c.truth) << ',' << format_double(c.squared_error);
    } else {
      os << ',' << format_double(c.truth) << ',';
    }
    os << ',' << c.seed << ',' << csv_field(c.error_note) << '\n';
  }
  return os.str();
}

std::string to_csv(const AllocationPlan& plan, bool integer_budgets, const Provenance& provenance) {
  std::ostringstream os;
  csv_header(os, provenance);
  if (plan.uniform_fallback) os << "# warning: all weights zero, budget split evenly\n";
  os << "problem_id,budget\n";
  const auto ints = integer_budgets ? plan.rounded() : std::vector<std::int64_t>{};
  for (std::size_t i = 0; i < plan.budgets.size(); ++i) {
    os << csv_field(plan.problem_ids[i]) << ',';
    if (integer_budgets) {
      os << ints[i];
    } else {
      os << format_double(plan.budgets[i]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace passk
