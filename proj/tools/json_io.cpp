#include "json_io.hpp"

#include <cmath>
#include <limits>

namespace blurfitts::io {

json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

double number_or_nan(const json& value) {
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return value.get<double>();
}

json to_json(const TaskCondition& cond) { return {{"A", cond.A}, {"W", cond.W}, {"B", cond.B}}; }

TaskCondition condition_from_json(const json& j) {
  return {j.at("A").get<double>(), j.at("W").get<double>(), j.at("B").get<double>()};
}

json to_json(const ModelParams& p) {
  json j{{"a", p.a}, {"b", p.b}};
  if (p.c) j["c"] = *p.c;
  if (p.d) j["d"] = *p.d;
  if (p.e) j["e"] = *p.e;
  return j;
}

ModelParams params_from_json(const ModelSpec& spec, const json& j) {
  static constexpr const char* names[] = {"a", "b", "c", "d", "e"};
  std::vector<double> values;
  for (std::size_t i = 0; i < spec.param_count(); ++i) {
    if (!j.contains(names[i]))
      throw DomainError(std::string("model '") + std::string(to_string(spec.kind)) +
                        "' needs constant '" + names[i] + "'");
    values.push_back(j.at(names[i]).get<double>());
  }
  for (std::size_t i = spec.param_count(); i < 5; ++i)
    if (j.contains(names[i]))
      throw DomainError(std::string("model '") + std::string(to_string(spec.kind)) +
                        "' has no constant '" + names[i] + "'");
  return ModelParams::from_vector(spec, values);
}

json to_json(const FitReport& r) {
  return {{"label", r.label},
          {"model", to_string(r.spec.kind)},
          {"formula", r.spec.formula()},
          {"param_count", r.spec.param_count()},
          {"params", to_json(r.params)},
          {"rss", number(r.rss)},
          {"adj_r2", number(r.adj_r2)},
          {"aic", number(r.aic)},
          {"perfect_fit", r.rss == 0.0},
          {"n_points", r.n_points},
          {"iterations", r.iterations},
          {"starts", r.starts_tried}};
}

FitReport fit_report_from_json(const json& j) {
  FitReport r;
  r.label = j.value("label", "");
  r.spec = {parse_model_kind(j.at("model").get<std::string>())};
  r.params = params_from_json(r.spec, j.at("params"));
  r.rss = number_or_nan(j.value("rss", json(nullptr)));
  r.adj_r2 = number_or_nan(j.value("adj_r2", json(nullptr)));
  r.aic = number_or_nan(j.value("aic", json(nullptr)));
  if (j.value("perfect_fit", false)) r.aic = -std::numeric_limits<double>::infinity();
  r.n_points = j.value("n_points", std::size_t{0});
  return r;
}

json to_json(const CvReport& r) {
  json folds = json::array();
  for (const auto& f : r.per_fold) {
    json row = to_json(f.held_out);
    row["observed"] = f.observed;
    row["predicted"] = number(f.predicted);
    row["abs_error"] = number(std::abs(f.predicted - f.observed));
    if (f.error) row["error"] = *f.error;
    folds.push_back(std::move(row));
  }
  return {{"model", to_string(r.spec.kind)},
          {"r2", number(r.r2)},
          {"mae", number(r.mae)},
          {"n_folds", r.per_fold.size()},
          {"complete", r.complete},
          {"folds", std::move(folds)}};
}

json to_json(const ConditionSummary& s, bool grand_mean) {
  json j;
  if (!grand_mean) j["participant"] = s.participant;
  j["block"] = to_string(s.block);
  j["A"] = s.condition.A;
  j["W"] = s.condition.W;
  j["B"] = s.condition.B;
  j["er"] = s.er;
  j["mean_mt"] = number(s.mean_mt);
  j["n_trials"] = s.n_trials;
  j["n_errors"] = s.n_errors;
  if (grand_mean) j["n_participants"] = s.n_participants;
  return j;
}

ConditionSummary summary_from_json(const json& j, bool grand_mean) {
  ConditionSummary s;
  if (!grand_mean) s.participant = j.at("participant").get<std::string>();
  s.block = parse_block(j.at("block").get<std::string>());
  s.condition = condition_from_json(j);
  s.er = j.at("er").get<double>();
  s.mean_mt = number_or_nan(j.at("mean_mt"));
  s.n_trials = j.at("n_trials").get<std::size_t>();
  s.n_errors = j.at("n_errors").get<std::size_t>();
  if (grand_mean) s.n_participants = j.value("n_participants", std::size_t{1});
  return s;
}

json to_json(const CorrectionResult& r) {
  return {{"A", r.condition.A},
          {"W", r.condition.W},
          {"B", r.condition.B},
          {"delta_w", r.delta_w},
          {"delta_a", r.delta_a},
          {"corrected_W", r.corrected_W},
          {"corrected_A", r.corrected_A},
          {"rounded_W", r.rounded_W},
          {"corrected_effective_width", r.corrected_effective_width},
          {"feasible", r.feasible}};
}

json to_json(const TostResult& r) {
  return {{"n", r.n},
          {"mean_diff", r.mean_diff},
          {"sd_diff", r.sd_diff},
          {"bound", r.bound},
          {"t_lower", r.t_lower},
          {"t_upper", r.t_upper},
          {"p_lower", r.p_lower},
          {"p_upper", r.p_upper},
          {"p_tost", r.p_tost},
          {"equivalent_unadjusted", r.equivalent}};
}

json to_json(const BatteryReport& r) {
  json tests = json::array();
  for (const auto& t : r.tests) {
    json row{{"A", t.A}, {"W", t.W}, {"B", t.B}, {"participants", t.participants},
             {"diffs", t.diffs}, {"equivalent", t.equivalent}};
    if (t.result) row["tost"] = to_json(*t.result);
    if (t.p_adjusted) row["p_holm"] = *t.p_adjusted;
    if (t.error) row["error"] = *t.error;
    tests.push_back(std::move(row));
  }
  return {{"baseline_B", r.baseline_B},
          {"dz", r.dz},
          {"alpha", r.alpha},
          {"n_tests", r.tests.size()},
          {"n_equivalent", r.n_equivalent},
          {"complete", r.complete},
          {"missing", r.missing},
          {"tests", std::move(tests)}};
}

json to_json(const TargetLayout& layout) {
  json centers = json::array();
  for (const auto& c : layout.centers) centers.push_back({{"x", c.x}, {"y", c.y}});
  json j{{"n", layout.n_targets},
         {"A", layout.A},
         {"W", layout.W},
         {"B", layout.B ? json(*layout.B) : json(nullptr)},
         {"circle_diameter", layout.circle_diameter},
         {"centers", std::move(centers)},
         {"order", layout.order}};
  if (!layout.warnings.empty()) j["warnings"] = layout.warnings;
  return j;
}

json tool_info() { return {{"name", "blurfitts"}, {"version", BLURFITTS_VERSION}}; }

}  // namespace blurfitts::io
