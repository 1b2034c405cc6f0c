#include "blurfitts/fitting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "blurfitts/least_squares.hpp"

namespace blurfitts {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool within_domain(const std::vector<ParamRole>& roles, std::span<const double> theta,
                   const TaskCondition& cond) {
  if (!(cond.A > 0.0) || !(cond.W > 0.0)) return false;
  const double s = cond.B - 1.0;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i] == ParamRole::width_shrink && !(cond.W - theta[i] * s > 0.0)) return false;
    if (roles[i] == ParamRole::distance_shift && !(cond.A + theta[i] * s > 0.0)) return false;
  }
  return true;
}

bool is_nonlinear(ParamRole role) {
  return role == ParamRole::width_shrink || role == ParamRole::distance_shift;
}

bool is_blur_coefficient(ParamRole role) {
  return role == ParamRole::width_shrink || role == ParamRole::distance_shift ||
         role == ParamRole::linear_blur;
}

double total_sum_of_squares(const Dataset& data) {
  double mean = 0.0;
  for (const auto& p : data.points) mean += p.mean_mt;
  mean /= static_cast<double>(data.points.size());
  double ss = 0.0;
  for (const auto& p : data.points) ss += (p.mean_mt - mean) * (p.mean_mt - mean);
  return ss;
}

void check_dataset(const ModelSpec& spec, const Dataset& data) {
  std::set<TaskCondition> seen;
  for (const auto& p : data.points) {
    validate_condition(p.condition);
    if (!std::isfinite(p.mean_mt))
      throw FitError("dataset '" + data.label + "' has a non-finite mean MT");
    if (!seen.insert(p.condition).second)
      throw FitError("dataset '" + data.label + "' repeats a condition");
  }
  if (data.points.size() < spec.param_count() + 1)
    throw FitError("model '" + std::string(to_string(spec.kind)) + "' needs at least " +
                   std::to_string(spec.param_count() + 1) + " conditions, dataset '" +
                   data.label + "' has " + std::to_string(data.points.size()));
}

// Every combination of start values for the nonlinear slots, in grid order.
std::vector<std::vector<double>> nonlinear_starts(const std::vector<ParamRole>& roles,
                                                  const Dataset& data,
                                                  const FitOptions& options) {
  double shrink_cap = inf;
  for (const auto& p : data.points)
    if (p.condition.B > 1.0) shrink_cap = std::min(shrink_cap, p.condition.W / (p.condition.B - 1.0));
  double grid_max = 0.0;
  for (double g : options.start_grid) grid_max = std::max(grid_max, std::abs(g));

  std::vector<std::vector<double>> per_slot;
  for (ParamRole role : roles) {
    if (!is_nonlinear(role)) continue;
    std::vector<double> values;
    for (double g : options.start_grid) {
      double v = g;
      if (role == ParamRole::width_shrink && std::isfinite(shrink_cap) && grid_max > 0.0)
        v = g / grid_max * 0.95 * shrink_cap;
      values.push_back(v);
    }
    if (values.empty()) values.push_back(0.0);
    per_slot.push_back(std::move(values));
  }

  std::vector<std::vector<double>> combos{{}};
  for (const auto& slot : per_slot) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : combos)
      for (double v : slot) {
        auto c = prefix;
        c.push_back(v);
        next.push_back(std::move(c));
      }
    combos = std::move(next);
  }
  return combos;
}

}  // namespace

std::string_view to_string(SupportCategory category) noexcept {
  switch (category) {
    case SupportCategory::supported: return "supported";
    case SupportCategory::considerable_support: return "considerable support";
    case SupportCategory::much_less_support: return "much less support";
    case SupportCategory::weak_support: return "weak support";
    case SupportCategory::no_support: return "no support";
  }
  return "unknown";
}

SupportCategory support_category(double delta_aic) {
  if (std::isnan(delta_aic) || delta_aic < 0.0)
    throw DomainError("AIC difference must be a non-negative number");
  if (delta_aic < 2.0) return SupportCategory::supported;
  if (delta_aic <= 4.0) return SupportCategory::considerable_support;
  if (delta_aic <= 7.0) return SupportCategory::much_less_support;
  if (delta_aic <= 10.0) return SupportCategory::weak_support;
  return SupportCategory::no_support;
}

double adjusted_r2(double rss, const Dataset& data, std::size_t k) {
  const std::size_t n = data.points.size();
  if (n <= k + 1) throw DomainError("adjusted R^2 needs more points than constants + 1");
  const double ss_tot = total_sum_of_squares(data);
  if (ss_tot == 0.0) throw DomainError("adjusted R^2 is undefined for constant data");
  const double r2 = 1.0 - rss / ss_tot;
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return 1.0 - (1.0 - r2) * (nd - 1.0) / (nd - kd - 1.0);
}

double aic(double rss, std::size_t n, std::size_t k) {
  if (n == 0) throw DomainError("AIC needs at least one point");
  if (rss < 0.0 || std::isnan(rss)) throw DomainError("residual sum of squares must be >= 0");
  if (rss == 0.0) return -inf;
  const auto nd = static_cast<double>(n);
  return nd * std::log(rss / nd) + 2.0 * static_cast<double>(k + 1);
}

FitReport fit(const ModelSpec& spec, const Dataset& data, const FitOptions& options) {
  check_dataset(spec, data);

  const auto roles = param_roles(spec.kind);
  const std::size_t n_par = roles.size();
  const std::size_t n = data.points.size();

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.points[i].mean_mt;

  std::vector<double> lower(n_par, -inf);
  for (std::size_t i = 0; i < n_par; ++i)
    if (is_blur_coefficient(roles[i])) lower[i] = 0.0;

  ResidualFn residual_fn = [&](std::span<const double> theta, std::span<double> residuals,
                               std::span<double> jacobian) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cond = data.points[i].condition;
      if (!within_domain(roles, theta, cond)) return false;
      std::span<double> row = jacobian.empty() ? std::span<double>{}
                                               : jacobian.subspan(i * n_par, n_par);
      residuals[i] = y[i] - evaluate_packed(spec.kind, theta, cond, row);
    }
    return true;
  };

  std::vector<std::size_t> linear_slots;
  for (std::size_t i = 0; i < n_par; ++i)
    if (!is_nonlinear(roles[i])) linear_slots.push_back(i);

  LevenbergMarquardtOptions lm_options;
  lm_options.max_iterations = options.max_iterations;

  std::optional<LevenbergMarquardtResult> best;
  std::size_t feasible_starts = 0;
  std::vector<double> gradient(n_par);
  std::vector<double> design(n * linear_slots.size());

  for (const auto& combo : nonlinear_starts(roles, data, options)) {
    std::vector<double> theta(n_par, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_par; ++i)
      if (is_nonlinear(roles[i])) theta[i] = combo[k++];

    // Given the nonlinear slots, the model is linear in the rest.
    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i) {
      const auto& cond = data.points[i].condition;
      if (!within_domain(roles, theta, cond)) {
        feasible = false;
        break;
      }
      evaluate_packed(spec.kind, theta, cond, gradient);
      for (std::size_t j = 0; j < linear_slots.size(); ++j)
        design[j * n + i] = gradient[linear_slots[j]];
    }
    if (!feasible) continue;

    const auto beta = solve_linear_least_squares(design, n, linear_slots.size(), y);
    for (std::size_t j = 0; j < linear_slots.size(); ++j) {
      const std::size_t slot = linear_slots[j];
      theta[slot] = std::isfinite(beta[j]) ? std::max(beta[j], lower[slot]) : 0.0;
    }

    auto result = levenberg_marquardt(residual_fn, n, std::move(theta), lower, lm_options);
    if (!std::isfinite(result.rss)) continue;
    ++feasible_starts;
    if (!best || result.rss < best->rss) best = std::move(result);
  }

  if (!best)
    throw FitError("model '" + std::string(to_string(spec.kind)) +
                   "': every start violates the effective width/distance constraints");
  if (!best->converged)
    throw FitError("model '" + std::string(to_string(spec.kind)) + "' did not converge within " +
                   std::to_string(options.max_iterations) + " iterations");

  FitReport report;
  report.label = data.label;
  report.spec = spec;
  report.params = ModelParams::from_vector(spec, best->theta);
  report.rss = best->rss;
  report.n_points = n;
  report.iterations = best->iterations;
  report.starts_tried = feasible_starts;
  report.aic = aic(report.rss, n, n_par);
  if (n > n_par + 1 && total_sum_of_squares(data) > 0.0)
    report.adj_r2 = adjusted_r2(report.rss, data, n_par);
  else
    report.adj_r2 = std::numeric_limits<double>::quiet_NaN();
  return report;
}

CvReport loocv(const ModelSpec& spec, const Dataset& data, const FitOptions& options) {
  const std::size_t n = data.points.size();
  if (n < spec.param_count() + 2)
    throw FitError("cross-validation of '" + std::string(to_string(spec.kind)) + "' needs at least " +
                   std::to_string(spec.param_count() + 2) + " conditions");

  CvReport report;
  report.spec = spec;
  report.per_fold.resize(n);

  auto run_fold = [&](std::size_t fold) {
    CvFold& out = report.per_fold[fold];
    out.held_out = data.points[fold].condition;
    out.observed = data.points[fold].mean_mt;
    Dataset train;
    train.label = data.label;
    train.points.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      if (i != fold) train.points.push_back(data.points[i]);
    try {
      const auto fitted = fit(spec, train, options);
      out.predicted = predict_mt(spec, fitted.params, out.held_out).value;
    } catch (const std::exception& e) {
      out.error = e.what();
      out.predicted = std::numeric_limits<double>::quiet_NaN();
    }
  };

  unsigned workers = options.threads ? options.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t f = 0; f < n; ++f) run_fold(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t f = next++; f < n; f = next++) run_fold(f);
      });
  }

  // Aggregate in fold order so the report does not depend on scheduling.
  double abs_sum = 0.0;
  double ss_res = 0.0;
  double mean_obs = 0.0;
  std::size_t used = 0;
  for (const auto& f : report.per_fold) {
    if (f.error) {
      report.complete = false;
      continue;
    }
    abs_sum += std::abs(f.predicted - f.observed);
    ss_res += (f.predicted - f.observed) * (f.predicted - f.observed);
    mean_obs += f.observed;
    ++used;
  }
  if (used == 0) {
    report.mae = report.r2 = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  mean_obs /= static_cast<double>(used);
  double ss_tot = 0.0;
  for (const auto& f : report.per_fold)
    if (!f.error) ss_tot += (f.observed - mean_obs) * (f.observed - mean_obs);
  report.mae = abs_sum / static_cast<double>(used);
  report.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : std::numeric_limits<double>::quiet_NaN();
  return report;
}

ComparisonReport rank_by_aic(std::vector<FitReport> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const FitReport& x, const FitReport& y) { return x.aic < y.aic; });
  ComparisonReport out;
  const double best = reports.empty() ? 0.0 : reports.front().aic;
  for (const auto& r : reports) {
    // Two perfect fits tie at -inf; treat that as no difference.
    double delta = (r.aic == best) ? 0.0 : r.aic - best;
    if (std::isnan(delta)) delta = inf;
    out.delta_aic.push_back(delta);
    out.support.push_back(support_category(delta));
  }
  out.ranked = std::move(reports);
  return out;
}

ComparisonReport compare(const std::vector<ModelSpec>& specs, const Dataset& data,
                         const FitOptions& options) {
  std::vector<FitReport> reports;
  reports.reserve(specs.size());
  for (const auto& spec : specs) reports.push_back(fit(spec, data, options));
  return rank_by_aic(std::move(reports));
}

}  // namespace blurfitts
