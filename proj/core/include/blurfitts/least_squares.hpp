#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace blurfitts {

/// Residual callback for a least-squares problem.
///
/// Fills `residuals` (observed - predicted) and, when `jacobian` is non-empty,
/// the row-major derivative of the *prediction* with respect to theta
/// (n_residuals x n_params). Returns false when theta lies outside the
/// model's domain; the solver treats that as an infinitely bad point.
using ResidualFn =
    std::function<bool(std::span<const double> theta, std::span<double> residuals,
                       std::span<double> jacobian)>;

struct LevenbergMarquardtOptions {
  int max_iterations = 500;
  double rss_relative_tolerance = 1e-15;
  double step_relative_tolerance = 1e-13;
};

struct LevenbergMarquardtResult {
  std::vector<double> theta;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling and simple lower
/// bounds (projection plus an active set for parameters pinned at a bound).
/// Deterministic: no randomness, no wall-clock dependence.
LevenbergMarquardtResult levenberg_marquardt(const ResidualFn& fn, std::size_t n_residuals,
                                             std::vector<double> theta,
                                             std::span<const double> lower_bounds,
                                             const LevenbergMarquardtOptions& options = {});

/// Ordinary least squares for a dense column-major design (n_rows x n_cols),
/// rank-revealing. Returns the coefficient vector.
std::vector<double> solve_linear_least_squares(std::span<const double> design,
                                               std::size_t n_rows, std::size_t n_cols,
                                               std::span<const double> y);

}  // namespace blurfitts
