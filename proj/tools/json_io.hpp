#pragma once

#include <string>
#include <vector>

#include "blurfitts/correction.hpp"
#include "blurfitts/fitting.hpp"
#include "blurfitts/protocol.hpp"
#include "blurfitts/stats.hpp"
#include "json.hpp"

namespace blurfitts::io {

using nlohmann::json;

/// Non-finite values become null so the output stays valid JSON.
json number(double value);
double number_or_nan(const json& value);

json to_json(const TaskCondition& cond);
TaskCondition condition_from_json(const json& j);

json to_json(const ModelParams& params);
ModelParams params_from_json(const ModelSpec& spec, const json& j);

json to_json(const FitReport& report);
FitReport fit_report_from_json(const json& j);

json to_json(const CvReport& report);
json to_json(const ConditionSummary& summary, bool grand_mean);
ConditionSummary summary_from_json(const json& j, bool grand_mean);
json to_json(const CorrectionResult& result);
json to_json(const TostResult& result);
json to_json(const BatteryReport& report);

/// {n, A, W, B, circle_diameter, centers:[{x,y}...], order:[...]}
json to_json(const TargetLayout& layout);

json tool_info();

}  // namespace blurfitts::io
