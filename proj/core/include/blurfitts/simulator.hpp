#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blurfitts/model.hpp"
#include "blurfitts/protocol.hpp"

namespace blurfitts {

/// Ground-truth participant for oracle tests. The endpoint model is a test
/// device, not a behavioral claim: click scatter around the target center is
/// isotropic Gaussian with per-axis SD
///     endpoint_spread_ratio * W * (W / effective_width),
/// i.e. proportional to W without blur and inflated by the fraction of the
/// width the truth model says blur takes away.
struct SyntheticUser {
  std::string participant = "S1";
  ModelSpec truth_spec;
  ModelParams truth_params;
  double mt_noise_sd = 0.0;            // ms
  double endpoint_spread_ratio = 0.0;  // dimensionless
  std::uint64_t seed = 0;
};

inline constexpr double min_movement_time_ms = 100.0;
inline constexpr double retry_delay_ms = 300.0;

struct SessionOptions {
  std::size_t n_targets = 21;
  Block block = Block::no_correction;
  std::size_t session = 0;
  /// Rendered diameter when it differs from the nominal W (corrected block).
  /// The log keeps the nominal condition.
  std::optional<double> rendered_width;
  Point screen_center{960.0, 540.0};
  /// After this many misses on one target the next click is placed on the
  /// center, so a session always terminates.
  int max_attempts = 50;
};

/// Counts the simulator keeps while generating, for round-trip checks.
struct SessionTally {
  std::size_t n_trials = 0;
  std::size_t n_errors = 0;
  double error_free_mt_sum = 0.0;
  std::size_t n_error_free = 0;
};

/// Deterministic given (user.seed, condition, block, session, rendered width).
SessionLog simulate_session(const SyntheticUser& user, const TaskCondition& cond,
                            const SessionOptions& options = {}, SessionTally* tally = nullptr);

struct ExperimentOptions {
  std::size_t n_targets = 21;
  std::size_t sessions_per_condition = 1;
  Block block = Block::no_correction;
  std::map<TaskCondition, double> rendered_widths;
};

/// One session per (condition, repetition), in design order. Sub-seeds come
/// from the condition values and repetition, so dropping a condition leaves
/// every other session unchanged.
std::vector<SessionLog> simulate_experiment(const SyntheticUser& user,
                                            const std::vector<TaskCondition>& design,
                                            const ExperimentOptions& options = {});

/// Independent seed for the index-th synthetic participant.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Full factorial grid in A-major, then W, then B order.
std::vector<TaskCondition> factorial_design(const std::vector<double>& As,
                                            const std::vector<double>& Ws,
                                            const std::vector<double>& Bs);

/// A in {300, 500}, W in {12, 18, 36, 78}, B in {1, 21, ..., 101}.
std::vector<TaskCondition> experiment1_design();
/// A in {300, 1100}, same W and B.
std::vector<TaskCondition> experiment2_design();

}  // namespace blurfitts
