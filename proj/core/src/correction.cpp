#include "blurfitts/correction.hpp"

#include <cmath>
#include <string>

namespace blurfitts {

namespace {

double ab_shift_mt(const AbShiftParams& p, double A, double W, double B) {
  const double theta[] = {p.a, p.b, p.c, p.d};
  return evaluate_packed(ModelKind::one_part_ab_shift, theta, {A, W, B});
}

void require_positive_distance(double A) {
  if (!(A > 0.0)) throw DomainError("correction requires target distance A > 0");
}

}  // namespace

AbShiftParams AbShiftParams::from(const ModelSpec& spec, const ModelParams& params) {
  if (spec.kind != ModelKind::one_part_ab_shift)
    throw UnsupportedModelError("corrections are defined only for the one-part-ab-shift model, not '" +
                                std::string(to_string(spec.kind)) + "'");
  if (!params.c || !params.d || params.e)
    throw DomainError("one-part-ab-shift expects constants a, b, c, d");
  return {params.a, params.b, *params.c, *params.d};
}

double delta_w_closed_form(const AbShiftParams& p, const TaskCondition& cond) {
  require_positive_distance(cond.A);
  return (cond.B - 1.0) * (p.c * cond.A + p.d * cond.W) / cond.A;
}

double delta_w_numeric(const AbShiftParams& p, const TaskCondition& cond) {
  require_positive_distance(cond.A);
  if (!(cond.W > 0.0)) throw DomainError("correction requires target width W > 0");

  const double target = ab_shift_mt(p, cond.A, cond.W, 1.0);
  const double shrink = p.c * (cond.B - 1.0);

  // MT diverges as the effective width approaches zero, so start just above it.
  double lo = 0.0;
  if (cond.W - shrink <= 0.0) lo = (shrink - cond.W) * (1.0 + 1e-12) + 1e-12;
  double hi = 10.0 * cond.W * cond.B;

  auto gap = [&](double dw) { return ab_shift_mt(p, cond.A, cond.W + dw, cond.B) - target; };

  double f_lo = gap(lo);
  if (f_lo == 0.0) return lo;
  double f_hi = gap(hi);
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0))
    throw SolverError("no sign change of the MT difference on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");

  // Bisect until the bracket collapses to adjacent doubles; the MT gap is then
  // far below 1e-9 ms for any realistic slope.
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = gap(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double delta_a(const AbShiftParams& p, const TaskCondition& cond) {
  if (!(cond.W > 0.0)) throw DomainError("distance correction requires target width W > 0");
  return (cond.B - 1.0) * (p.d + p.c * cond.A / cond.W);
}

double delta_w_given_delta_a(const AbShiftParams& p, const TaskCondition& cond,
                             double delta_a_px) {
  require_positive_distance(cond.A);
  return -(cond.W / cond.A) * delta_a_px + delta_w_closed_form(p, cond);
}

CorrectionResult correct_condition(const ModelSpec& spec, const ModelParams& params,
                                   const TaskCondition& cond, CorrectionPolicy policy) {
  const auto p = AbShiftParams::from(spec, params);

  CorrectionResult r;
  r.condition = cond;
  switch (policy.kind) {
    case CorrectionPolicy::Kind::width_only:
      r.delta_w = delta_w_closed_form(p, cond);
      break;
    case CorrectionPolicy::Kind::distance_only:
      r.delta_a = delta_a(p, cond);
      break;
    case CorrectionPolicy::Kind::joint:
      r.delta_a = policy.delta_a;
      r.delta_w = delta_w_given_delta_a(p, cond, policy.delta_a);
      break;
  }
  r.corrected_W = cond.W + r.delta_w;
  r.corrected_A = cond.A - r.delta_a;
  r.rounded_W = std::lround(r.corrected_W);
  r.corrected_effective_width = effective_width(r.corrected_W, cond.B, p.c);
  r.feasible = r.corrected_A > 0.0 && r.corrected_effective_width > 0.0;
  return r;
}

}  // namespace blurfitts
