#pragma once

#include <stdexcept>

#include "blurfitts/model.hpp"

namespace blurfitts {

/// Corrections exist only for the A-shift/W-shrink one-part model.
class UnsupportedModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The numeric root finder could not bracket a solution.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constants of a + b*log2((A + d(B-1))/(W - c(B-1)) + 1).
struct AbShiftParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;  // width shrink per blur pixel
  double d = 0.0;  // distance shift per blur pixel

  /// Throws UnsupportedModelError for any other kind.
  static AbShiftParams from(const ModelSpec& spec, const ModelParams& params);

  ModelParams to_params() const { return {a, b, c, d, std::nullopt}; }
};

/// Target enlargement that brings predicted MT at B back to the B = 1 value:
/// (B - 1)(cA + dW) / A.
double delta_w_closed_form(const AbShiftParams& params, const TaskCondition& cond);

/// Same quantity by bisection on the MT difference. Independent of the
/// closed form; used to cross-check it.
double delta_w_numeric(const AbShiftParams& params, const TaskCondition& cond);

/// Distance reduction alone that equalizes MT: (B - 1)(d + cA/W).
double delta_a(const AbShiftParams& params, const TaskCondition& cond);

/// Width change that pairs with a chosen distance reduction so that
/// A/W = (A' + d(B-1)) / (W' - c(B-1)).
double delta_w_given_delta_a(const AbShiftParams& params, const TaskCondition& cond,
                             double delta_a);

struct CorrectionPolicy {
  enum class Kind { width_only, distance_only, joint };

  Kind kind = Kind::width_only;
  double delta_a = 0.0;  // only read for Kind::joint

  static CorrectionPolicy width_only() { return {Kind::width_only, 0.0}; }
  static CorrectionPolicy distance_only() { return {Kind::distance_only, 0.0}; }
  static CorrectionPolicy joint(double delta_a) { return {Kind::joint, delta_a}; }
};

struct CorrectionResult {
  TaskCondition condition;
  double delta_w = 0.0;
  double delta_a = 0.0;
  double corrected_W = 0.0;
  double corrected_A = 0.0;
  long rounded_W = 0;
  double corrected_effective_width = 0.0;
  bool feasible = false;
};

/// Infeasible corrections come back with feasible == false and are never clamped.
CorrectionResult correct_condition(const ModelSpec& spec, const ModelParams& params,
                                   const TaskCondition& cond, CorrectionPolicy policy);

}  // namespace blurfitts
