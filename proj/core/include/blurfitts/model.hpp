#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace blurfitts {

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A shrunken width or shifted distance inside a logarithm became non-positive.
class EffectiveWidthError : public DomainError {
 public:
  enum class Term { width, distance };

  EffectiveWidthError(Term term, double value);

  Term term() const noexcept { return term_; }
  double value() const noexcept { return value_; }

 private:
  Term term_;
  double value_;
};

/// One (A, W, B) cell of a pointing design. Distances in pixels; B is the
/// Gaussian kernel size (1 = no blur).
///
/// Plain value: predict_mt accepts fractional or even B so optimizers can
/// probe freely. Use validate_condition() at ingestion boundaries.
struct TaskCondition {
  double A = 0.0;
  double W = 0.0;
  double B = 1.0;

  friend bool operator==(const TaskCondition&, const TaskCondition&) = default;
  friend auto operator<=>(const TaskCondition&, const TaskCondition&) = default;
};

/// Throws DomainError unless A > 0, W > 0 and B is an odd integer >= 1.
void validate_condition(const TaskCondition& cond);

/// Kernel size plus the Gaussian standard deviation OpenCV derives from it.
struct BlurLevel {
  int ksize = 1;
  double sigma = 0.5;

  static BlurLevel from_ksize(int ksize);
};

enum class ModelKind {
  one_part,
  one_part_lin_b,
  one_part_w_shrink,
  one_part_ab_shift,
  two_part,
  two_part_lin_b,
  two_part_w_shrink,
  two_part_ab_shift,
};

inline constexpr std::array<ModelKind, 8> all_model_kinds{
    ModelKind::one_part,          ModelKind::one_part_lin_b,
    ModelKind::one_part_w_shrink, ModelKind::one_part_ab_shift,
    ModelKind::two_part,          ModelKind::two_part_lin_b,
    ModelKind::two_part_w_shrink, ModelKind::two_part_ab_shift,
};

struct ModelSpec {
  ModelKind kind = ModelKind::one_part;

  constexpr std::size_t param_count() const noexcept {
    switch (kind) {
      case ModelKind::one_part: return 2;
      case ModelKind::one_part_lin_b:
      case ModelKind::one_part_w_shrink:
      case ModelKind::two_part: return 3;
      case ModelKind::one_part_ab_shift:
      case ModelKind::two_part_lin_b:
      case ModelKind::two_part_w_shrink: return 4;
      case ModelKind::two_part_ab_shift: return 5;
    }
    return 0;
  }

  /// The blur-free model this kind collapses to at B = 1.
  ModelKind base_kind() const noexcept;

  /// Human-readable formula, e.g. "a + b*log2((A + d(B-1))/(W - c(B-1)) + 1)".
  std::string_view formula() const noexcept;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

std::string_view to_string(ModelKind kind) noexcept;

/// Parses the names produced by to_string(); throws DomainError otherwise.
ModelKind parse_model_kind(std::string_view name);

/// Constants a-e. Slots beyond the model's param_count stay empty.
struct ModelParams {
  double a = 0.0;
  double b = 0.0;
  std::optional<double> c;
  std::optional<double> d;
  std::optional<double> e;

  std::size_t count() const noexcept;

  /// Packs present constants in a, b, c, d, e order.
  std::vector<double> to_vector() const;

  /// Builds params from exactly spec.param_count() values.
  static ModelParams from_vector(const ModelSpec& spec, std::span<const double> values);

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct PredictedMT {
  double value = 0.0;  // milliseconds
};

/// Shannon index of difficulty log2(A/W + 1), in bits.
double index_of_difficulty(double A, double W);

/// sigma = 0.3 * ((ksize - 1)/2 - 1) + 0.8
double sigma_from_ksize(int ksize);

/// W - c(B - 1). May be non-positive; consumers reject that.
double effective_width(double W, double B, double c) noexcept;

/// Width left over after blur shrinkage for kinds that shrink W, else W.
double model_effective_width(const ModelSpec& spec, const ModelParams& params,
                             const TaskCondition& cond);

/// Distance after blur shift for kinds that shift A, else A.
double model_effective_distance(const ModelSpec& spec, const ModelParams& params,
                                const TaskCondition& cond);

PredictedMT predict_mt(const ModelSpec& spec, const ModelParams& params,
                       const TaskCondition& cond);

/// Packed-parameter evaluation used by the optimizer. `theta` holds
/// spec.param_count() values; `gradient`, when non-empty, receives
/// d(MT)/d(theta) and must have the same size.
double evaluate_packed(ModelKind kind, std::span<const double> theta,
                       const TaskCondition& cond, std::span<double> gradient = {});

/// Role of each packed slot, used for constraints and start grids.
enum class ParamRole {
  intercept,
  log_slope,        // multiplies a log term
  linear_blur,      // ms per pixel of (B - 1)
  width_shrink,     // W - k(B - 1)
  distance_shift,   // A + k(B - 1)
};

std::vector<ParamRole> param_roles(ModelKind kind);

}  // namespace blurfitts
