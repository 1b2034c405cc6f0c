#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blurfitts/model.hpp"
#include "blurfitts/protocol.hpp"

namespace blurfitts {

/// Paired differences with zero spread leave the equivalence bound undefined.
class DegenerateVarianceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Upper-tail critical value: P(T > q) = alpha.
double student_t_upper_quantile(double alpha, double df);

struct TostResult {
  double mean_diff = 0.0;
  double sd_diff = 0.0;
  std::size_t n = 0;
  double dz = 0.2;
  double alpha = 0.05;
  double bound = 0.0;  // dz * sd_diff
  double t_lower = 0.0;
  double t_upper = 0.0;
  double p_lower = 1.0;
  double p_upper = 1.0;
  double p_tost = 1.0;
  bool equivalent = false;
};

/// Two one-sided paired t tests against +/- dz * SD(diffs).
TostResult paired_tost(std::span<const double> diffs, double dz = 0.2, double alpha = 0.05);

/// Largest |t| either one-sided test can reach when the bound is dz * SD:
/// dz * sqrt(n), attained at a zero mean difference.
double tost_max_statistic(std::size_t n, double dz);

/// Whether any data set of size n could be declared equivalent.
bool tost_can_reach_equivalence(std::size_t n, double dz, double alpha);

/// Holm step-down adjustment, returned in input order.
std::vector<double> holm_correct(std::span<const double> p_values);

struct BatteryTest {
  double A = 0.0;
  double W = 0.0;
  double B = 0.0;
  std::vector<std::string> participants;
  std::vector<double> diffs;  // MT(B) - MT(baseline), per participant
  std::optional<TostResult> result;
  std::optional<std::string> error;
  std::optional<double> p_adjusted;
  bool equivalent = false;
};

struct BatteryReport {
  double baseline_B = 1.0;
  double dz = 0.2;
  double alpha = 0.05;
  std::vector<BatteryTest> tests;
  std::vector<std::string> missing;
  bool complete = true;
  std::size_t n_equivalent = 0;
};

/// Per A x W cell and per non-baseline B: paired TOST over participants,
/// Holm across the battery on p_tost. Expects per-participant summaries of
/// a single block.
BatteryReport equivalence_battery(const std::vector<ConditionSummary>& summaries,
                                  double baseline_B = 1.0, double dz = 0.2,
                                  double alpha = 0.05);

}  // namespace blurfitts
