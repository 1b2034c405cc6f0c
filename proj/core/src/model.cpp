#include "blurfitts/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace blurfitts {

namespace {

std::string effective_term_message(EffectiveWidthError::Term term, double value) {
  std::ostringstream os;
  os.precision(17);
  os << "non-positive effective "
     << (term == EffectiveWidthError::Term::width ? "width" : "distance") << " (" << value
     << ") inside logarithm";
  return os.str();
}

constexpr double inv_ln2 = 1.0 / std::numbers::ln2;

double checked_width(double value) {
  if (!(value > 0.0)) throw EffectiveWidthError(EffectiveWidthError::Term::width, value);
  return value;
}

double checked_distance(double value) {
  if (!(value > 0.0)) throw EffectiveWidthError(EffectiveWidthError::Term::distance, value);
  return value;
}

void set_gradient(std::span<double> gradient, std::initializer_list<double> values) {
  if (gradient.empty()) return;
  std::size_t i = 0;
  for (double v : values) gradient[i++] = v;
}

}  // namespace

EffectiveWidthError::EffectiveWidthError(Term term, double value)
    : DomainError(effective_term_message(term, value)), term_(term), value_(value) {}

void validate_condition(const TaskCondition& cond) {
  if (!(cond.A > 0.0) || !std::isfinite(cond.A))
    throw DomainError("target distance A must be positive");
  if (!(cond.W > 0.0) || !std::isfinite(cond.W))
    throw DomainError("target width W must be positive");
  if (!(cond.B >= 1.0) || std::floor(cond.B) != cond.B ||
      std::fmod(cond.B, 2.0) != 1.0)
    throw DomainError("blur level B must be an odd integer >= 1");
}

BlurLevel BlurLevel::from_ksize(int ksize) { return {ksize, sigma_from_ksize(ksize)}; }

ModelKind ModelSpec::base_kind() const noexcept {
  switch (kind) {
    case ModelKind::one_part:
    case ModelKind::one_part_lin_b:
    case ModelKind::one_part_w_shrink:
    case ModelKind::one_part_ab_shift: return ModelKind::one_part;
    default: return ModelKind::two_part;
  }
}

std::string_view ModelSpec::formula() const noexcept {
  switch (kind) {
    case ModelKind::one_part: return "a + b*log2(A/W + 1)";
    case ModelKind::one_part_lin_b: return "a + b*log2(A/W + 1) + c(B-1)";
    case ModelKind::one_part_w_shrink: return "a + b*log2(A/(W - c(B-1)) + 1)";
    case ModelKind::one_part_ab_shift: return "a + b*log2((A + d(B-1))/(W - c(B-1)) + 1)";
    case ModelKind::two_part: return "a + b*log2(A) - c*log2(W)";
    case ModelKind::two_part_lin_b: return "a + b*log2(A) - c*log2(W) + d(B-1)";
    case ModelKind::two_part_w_shrink: return "a + b*log2(A) - c*log2(W - d(B-1))";
    case ModelKind::two_part_ab_shift: return "a + b*log2(A + c(B-1)) - d*log2(W - e(B-1))";
  }
  return "";
}

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::one_part: return "one-part";
    case ModelKind::one_part_lin_b: return "one-part-lin-b";
    case ModelKind::one_part_w_shrink: return "one-part-w-shrink";
    case ModelKind::one_part_ab_shift: return "one-part-ab-shift";
    case ModelKind::two_part: return "two-part";
    case ModelKind::two_part_lin_b: return "two-part-lin-b";
    case ModelKind::two_part_w_shrink: return "two-part-w-shrink";
    case ModelKind::two_part_ab_shift: return "two-part-ab-shift";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : all_model_kinds)
    if (to_string(k) == name) return k;
  throw DomainError("unknown model kind '" + std::string(name) + "'");
}

std::size_t ModelParams::count() const noexcept {
  return 2 + (c ? 1 : 0) + (d ? 1 : 0) + (e ? 1 : 0);
}

std::vector<double> ModelParams::to_vector() const {
  std::vector<double> out{a, b};
  for (const auto& slot : {c, d, e})
    if (slot) out.push_back(*slot);
  return out;
}

ModelParams ModelParams::from_vector(const ModelSpec& spec, std::span<const double> values) {
  if (values.size() != spec.param_count())
    throw DomainError("model '" + std::string(to_string(spec.kind)) + "' expects " +
                      std::to_string(spec.param_count()) + " constants, got " +
                      std::to_string(values.size()));
  ModelParams p;
  p.a = values[0];
  p.b = values[1];
  if (values.size() > 2) p.c = values[2];
  if (values.size() > 3) p.d = values[3];
  if (values.size() > 4) p.e = values[4];
  return p;
}

double index_of_difficulty(double A, double W) {
  if (!(A > 0.0) || !(W > 0.0))
    throw DomainError("index of difficulty requires A > 0 and W > 0");
  return std::log2(A / W + 1.0);
}

double sigma_from_ksize(int ksize) {
  if (ksize < 1 || ksize % 2 == 0) throw DomainError("ksize must be an odd integer >= 1");
  return 0.3 * ((ksize - 1) / 2.0 - 1.0) + 0.8;
}

double effective_width(double W, double B, double c) noexcept { return W - c * (B - 1.0); }

double model_effective_width(const ModelSpec& spec, const ModelParams& params,
                             const TaskCondition& cond) {
  switch (spec.kind) {
    case ModelKind::one_part_w_shrink:
    case ModelKind::one_part_ab_shift: return effective_width(cond.W, cond.B, params.c.value_or(0.0));
    case ModelKind::two_part_w_shrink: return effective_width(cond.W, cond.B, params.d.value_or(0.0));
    case ModelKind::two_part_ab_shift: return effective_width(cond.W, cond.B, params.e.value_or(0.0));
    default: return cond.W;
  }
}

double model_effective_distance(const ModelSpec& spec, const ModelParams& params,
                                const TaskCondition& cond) {
  switch (spec.kind) {
    case ModelKind::one_part_ab_shift: return cond.A + params.d.value_or(0.0) * (cond.B - 1.0);
    case ModelKind::two_part_ab_shift: return cond.A + params.c.value_or(0.0) * (cond.B - 1.0);
    default: return cond.A;
  }
}

double evaluate_packed(ModelKind kind, std::span<const double> t, const TaskCondition& cond,
                       std::span<double> gradient) {
  const double A = cond.A;
  const double W = cond.W;
  const double s = cond.B - 1.0;

  switch (kind) {
    case ModelKind::one_part: {
      const double id = index_of_difficulty(A, W);
      set_gradient(gradient, {1.0, id});
      return t[0] + t[1] * id;
    }
    case ModelKind::one_part_lin_b: {
      const double id = index_of_difficulty(A, W);
      set_gradient(gradient, {1.0, id, s});
      return t[0] + t[1] * id + t[2] * s;
    }
    case ModelKind::one_part_w_shrink: {
      const double we = checked_width(W - t[2] * s);
      checked_distance(A);
      const double r = A / we + 1.0;
      const double lg = std::log2(r);
      set_gradient(gradient, {1.0, lg, t[1] * inv_ln2 / r * A * s / (we * we)});
      return t[0] + t[1] * lg;
    }
    case ModelKind::one_part_ab_shift: {
      const double we = checked_width(W - t[2] * s);
      const double ae = checked_distance(A + t[3] * s);
      const double r = ae / we + 1.0;
      const double lg = std::log2(r);
      const double k = t[1] * inv_ln2 / r;
      set_gradient(gradient, {1.0, lg, k * ae * s / (we * we), k * s / we});
      return t[0] + t[1] * lg;
    }
    case ModelKind::two_part: {
      const double la = std::log2(checked_distance(A));
      const double lw = std::log2(checked_width(W));
      set_gradient(gradient, {1.0, la, -lw});
      return t[0] + t[1] * la - t[2] * lw;
    }
    case ModelKind::two_part_lin_b: {
      const double la = std::log2(checked_distance(A));
      const double lw = std::log2(checked_width(W));
      set_gradient(gradient, {1.0, la, -lw, s});
      return t[0] + t[1] * la - t[2] * lw + t[3] * s;
    }
    case ModelKind::two_part_w_shrink: {
      const double la = std::log2(checked_distance(A));
      const double we = checked_width(W - t[3] * s);
      const double lw = std::log2(we);
      set_gradient(gradient, {1.0, la, -lw, t[2] * inv_ln2 * s / we});
      return t[0] + t[1] * la - t[2] * lw;
    }
    case ModelKind::two_part_ab_shift: {
      const double ae = checked_distance(A + t[2] * s);
      const double we = checked_width(W - t[4] * s);
      const double la = std::log2(ae);
      const double lw = std::log2(we);
      set_gradient(gradient,
                   {1.0, la, t[1] * inv_ln2 * s / ae, -lw, t[3] * inv_ln2 * s / we});
      return t[0] + t[1] * la - t[3] * lw;
    }
  }
  throw DomainError("unknown model kind");
}

PredictedMT predict_mt(const ModelSpec& spec, const ModelParams& params,
                       const TaskCondition& cond) {
  if (params.count() != spec.param_count())
    throw DomainError("model '" + std::string(to_string(spec.kind)) + "' expects " +
                      std::to_string(spec.param_count()) + " constants, got " +
                      std::to_string(params.count()));
  const auto theta = params.to_vector();
  return {evaluate_packed(spec.kind, theta, cond)};
}

std::vector<ParamRole> param_roles(ModelKind kind) {
  using R = ParamRole;
  switch (kind) {
    case ModelKind::one_part: return {R::intercept, R::log_slope};
    case ModelKind::one_part_lin_b: return {R::intercept, R::log_slope, R::linear_blur};
    case ModelKind::one_part_w_shrink: return {R::intercept, R::log_slope, R::width_shrink};
    case ModelKind::one_part_ab_shift:
      return {R::intercept, R::log_slope, R::width_shrink, R::distance_shift};
    case ModelKind::two_part: return {R::intercept, R::log_slope, R::log_slope};
    case ModelKind::two_part_lin_b:
      return {R::intercept, R::log_slope, R::log_slope, R::linear_blur};
    case ModelKind::two_part_w_shrink:
      return {R::intercept, R::log_slope, R::log_slope, R::width_shrink};
    case ModelKind::two_part_ab_shift:
      return {R::intercept, R::log_slope, R::distance_shift, R::log_slope, R::width_shrink};
  }
  return {};
}

}  // namespace blurfitts
