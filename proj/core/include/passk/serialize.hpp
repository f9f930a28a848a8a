#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "passk/allocation.hpp"
#include "passk/distribution_fit.hpp"
#include "passk/estimators.hpp"
#include "passk/evaluation.hpp"
#include "passk/records.hpp"
#include "passk/regression.hpp"

namespace passk {

/// Embedded in every output artifact so the file can be regenerated.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
};

std::string tool_version();

/// Shortest decimal form that round-trips the double; "nan"/"inf" spelled out.
std::string format_double(double value);

std::string to_json(const BetaParams& params, const Provenance& provenance);
std::string to_json(const PowerLawFit& fit, const Provenance& provenance);
std::string to_json(const PassCurve& curve, const Provenance& provenance);
std::string to_json(const IntervalEstimate& interval, const Provenance& provenance);
std::string to_json(const ValidationReport& report, const Provenance& provenance);
std::string to_json(const SimulationResult& result, std::string_view method, std::int64_t budget, std::int64_t k,
                    const Provenance& provenance);

/// The "method" field of a fit file.
std::string fit_method_from_json(std::string_view text);
/// Reads a fit written by to_json(BetaParams); extra keys are ignored.
BetaParams beta_params_from_json(std::string_view text);

/// Reads a fit written by to_json(PowerLawFit).
PowerLawFit power_law_fit_from_json(std::string_view text);

/// "#"-prefixed provenance lines, then
/// budget,k,method,prediction,truth,squared_error,seed,error_note
std::string to_csv(const EvalGrid& grid, const Provenance& provenance);

/// "#"-prefixed provenance lines, then problem_id,budget.
std::string to_csv(const AllocationPlan& plan, bool integer_budgets, const Provenance& provenance);

}  // namespace passk
