#include "blurfitts/least_squares.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace blurfitts {

namespace {

struct Evaluation {
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;  // d(prediction)/d(theta)
  double rss = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

Evaluation evaluate(const ResidualFn& fn, const std::vector<double>& theta, std::size_t n_res,
                    bool with_jacobian) {
  const std::size_t n_par = theta.size();
  Evaluation ev;
  ev.residuals.resize(static_cast<Eigen::Index>(n_res));
  std::vector<double> jac_row_major(with_jacobian ? n_res * n_par : 0);
  ev.feasible = fn(theta, {ev.residuals.data(), n_res}, jac_row_major);
  if (!ev.feasible) return ev;
  ev.rss = ev.residuals.squaredNorm();
  if (!std::isfinite(ev.rss)) {
    ev.feasible = false;
    ev.rss = std::numeric_limits<double>::infinity();
    return ev;
  }
  if (with_jacobian) {
    ev.jacobian = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                 Eigen::RowMajor>>(
        jac_row_major.data(), static_cast<Eigen::Index>(n_res),
        static_cast<Eigen::Index>(n_par));
  }
  return ev;
}

}  // namespace

LevenbergMarquardtResult levenberg_marquardt(const ResidualFn& fn, std::size_t n_residuals,
                                             std::vector<double> theta,
                                             std::span<const double> lower_bounds,
                                             const LevenbergMarquardtOptions& options) {
  const std::size_t n_par = theta.size();
  for (std::size_t i = 0; i < n_par && i < lower_bounds.size(); ++i)
    theta[i] = std::max(theta[i], lower_bounds[i]);

  LevenbergMarquardtResult out;
  Evaluation current = evaluate(fn, theta, n_residuals, true);
  out.theta = theta;
  out.rss = current.rss;
  if (!current.feasible) return out;

  auto bound = [&](std::size_t i) {
    return i < lower_bounds.size() ? lower_bounds[i] : -std::numeric_limits<double>::infinity();
  };

  double lambda = 1e-3;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter + 1;
    if (current.rss == 0.0) {
      out.converged = true;
      break;
    }

    const Eigen::MatrixXd& J = current.jacobian;
    const Eigen::VectorXd g = J.transpose() * current.residuals;

    // Parameters sitting on their bound whose descent direction points outward
    // are frozen for this iteration.
    std::vector<Eigen::Index> free;
    for (std::size_t i = 0; i < n_par; ++i) {
      const bool pinned = theta[i] <= bound(i) && g(static_cast<Eigen::Index>(i)) <= 0.0;
      if (!pinned) free.push_back(static_cast<Eigen::Index>(i));
    }
    if (free.empty()) {
      out.converged = true;
      break;
    }

    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd Jf(J.rows(), nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
      Jf.col(k) = J.col(free[k]);
      gf(k) = g(free[k]);
    }
    const Eigen::MatrixXd JtJ = Jf.transpose() * Jf;
    Eigen::VectorXd scale = JtJ.diagonal();
    const double max_diag = scale.size() ? scale.maxCoeff() : 0.0;
    for (Eigen::Index k = 0; k < nf; ++k)
      scale(k) = std::max(scale(k), 1e-12 * std::max(max_diag, 1e-300));

    bool accepted = false;
    bool stalled = false;
    while (!accepted) {
      Eigen::MatrixXd lhs = JtJ;
      lhs.diagonal() += lambda * scale;
      const Eigen::VectorXd step = lhs.ldlt().solve(gf);

      std::vector<double> trial = theta;
      for (Eigen::Index k = 0; k < nf; ++k) {
        const auto i = static_cast<std::size_t>(free[k]);
        trial[i] = std::max(theta[i] + step(k), bound(i));
      }

      Evaluation next = evaluate(fn, trial, n_residuals, true);
      if (next.feasible && next.rss < current.rss) {
        double step_norm = 0.0;
        double theta_norm = 0.0;
        for (std::size_t i = 0; i < n_par; ++i) {
          step_norm += (trial[i] - theta[i]) * (trial[i] - theta[i]);
          theta_norm += theta[i] * theta[i];
        }
        const double decrease = current.rss - next.rss;
        theta = std::move(trial);
        current = std::move(next);
        lambda = std::max(lambda * 0.1, 1e-15);
        accepted = true;

        if (decrease <= options.rss_relative_tolerance * current.rss ||
            std::sqrt(step_norm) <= options.step_relative_tolerance *
                                        (std::sqrt(theta_norm) + options.step_relative_tolerance))
          stalled = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e20) {
          // No representable step improves the objective: a local minimum.
          stalled = true;
          break;
        }
      }
    }
    if (stalled) {
      out.converged = true;
      break;
    }
  }

  out.theta = theta;
  out.rss = current.rss;
  return out;
}

std::vector<double> solve_linear_least_squares(std::span<const double> design,
                                               std::size_t n_rows, std::size_t n_cols,
                                               std::span<const double> y) {
  const Eigen::Map<const Eigen::MatrixXd> X(design.data(), static_cast<Eigen::Index>(n_rows),
                                            static_cast<Eigen::Index>(n_cols));
  const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), static_cast<Eigen::Index>(n_rows));
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(rhs);
  return {beta.data(), beta.data() + beta.size()};
}

}  // namespace blurfitts
