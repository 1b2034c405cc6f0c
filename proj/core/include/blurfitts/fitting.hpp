#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blurfitts/model.hpp"

namespace blurfitts {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One fitting point: a condition with its mean movement time.
struct DataPoint {
  TaskCondition condition;
  double mean_mt = 0.0;  // ms
  std::size_t n_trials = 0;
};

struct Dataset {
  std::string label;
  std::vector<DataPoint> points;
};

struct FitOptions {
  int max_iterations = 500;
  /// Start values for the blur coefficients. Width-shrink coefficients are
  /// rescaled so the largest entry maps to 95% of the largest coefficient
  /// that keeps every effective width positive.
  std::vector<double> start_grid{0.0, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0};
  /// Worker threads for loocv folds; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct FitReport {
  std::string label;
  ModelSpec spec;
  ModelParams params;
  double rss = 0.0;
  double adj_r2 = 0.0;  // NaN when the data are constant
  double aic = 0.0;     // -inf for a perfect fit
  std::size_t n_points = 0;
  int iterations = 0;
  std::size_t starts_tried = 0;
};

struct CvFold {
  TaskCondition held_out;
  double predicted = 0.0;
  double observed = 0.0;
  std::optional<std::string> error;
};

struct CvReport {
  ModelSpec spec;
  double r2 = 0.0;
  double mae = 0.0;  // ms
  std::vector<CvFold> per_fold;
  bool complete = true;
};

enum class SupportCategory {
  supported,
  considerable_support,
  much_less_support,
  weak_support,  // the 7-10 gap the usual rules of thumb leave unnamed
  no_support,
};

std::string_view to_string(SupportCategory category) noexcept;

/// Category for an AIC difference from the best model.
SupportCategory support_category(double delta_aic);

struct ComparisonReport {
  std::vector<FitReport> ranked;  // ascending AIC
  std::vector<double> delta_aic;
  std::vector<SupportCategory> support;
};

/// Nonlinear least squares on condition means. Deterministic multi-start
/// Levenberg-Marquardt; blur coefficients are constrained to be >= 0 and to
/// keep every effective width and distance positive.
FitReport fit(const ModelSpec& spec, const Dataset& data, const FitOptions& options = {});

/// 1 - (1 - R^2)(n - 1)/(n - k - 1).
double adjusted_r2(double rss, const Dataset& data, std::size_t k);

/// Least-squares AIC: n ln(rss/n) + 2(k + 1). Returns -inf when rss == 0.
double aic(double rss, std::size_t n, std::size_t k);

/// Leave-one-condition-out cross-validation.
CvReport loocv(const ModelSpec& spec, const Dataset& data, const FitOptions& options = {});

/// Sorts existing reports by AIC and assigns support categories.
ComparisonReport rank_by_aic(std::vector<FitReport> reports);

/// Fits every spec and ranks them. Any fit failure propagates.
ComparisonReport compare(const std::vector<ModelSpec>& specs, const Dataset& data,
                         const FitOptions& options = {});

}  // namespace blurfitts
