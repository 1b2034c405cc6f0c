#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blurfitts/model.hpp"

namespace blurfitts {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point p, Point q) noexcept;

/// Circular multidirectional tapping layout. `centers` is already in click
/// order; `order[k]` is the angular slot of the k-th target.
struct TargetLayout {
  std::size_t n_targets = 0;
  double A = 0.0;
  double W = 0.0;
  std::optional<double> B;
  double circle_diameter = 0.0;
  Point circle_center;
  std::vector<Point> centers;
  std::vector<std::size_t> order;
  std::vector<std::string> warnings;
};

struct ScreenBounds {
  double width = 0.0;
  double height = 0.0;
};

/// index_k = (k * s) mod n with s = (n + 1)/2. n must be odd and >= 3.
std::vector<std::size_t> click_order(std::size_t n);

/// Places n equally spaced targets on a circle whose diameter makes every
/// consecutive click-order hop exactly A long. Exceeding `bounds` adds a
/// warning rather than failing.
TargetLayout generate_layout(std::size_t n, double A, double W, Point screen_center,
                             std::optional<ScreenBounds> bounds = std::nullopt,
                             std::optional<double> B = std::nullopt);

/// Boundary-inclusive: hits when the click lies within W/2 of the center.
bool is_hit(Point click, Point center, double W) noexcept;

/// Cyclic Latin square row: element p of row r is (r + p) mod k.
std::vector<std::size_t> latin_square_order(std::size_t k, std::size_t participant_index);

enum class Block { no_correction, correction };

/// CSV spelling: "nc" / "c".
std::string_view to_string(Block block) noexcept;
Block parse_block(std::string_view text);

struct TrialRecord {
  TaskCondition condition;
  std::size_t trial_index = 0;  // 0 is the start target
  double click_time = 0.0;      // ms since session start
  Point click_point;
  Point target_center;
  bool hit = false;
  int attempt = 1;  // 1-based attempt on this target
};

/// One session: a fixed condition, the start target, then the measured
/// targets. Trials are every click in the order they happened.
struct SessionLog {
  std::string participant;
  Block block = Block::no_correction;
  TaskCondition condition;
  std::size_t session = 0;
  bool practice = false;
  std::vector<TrialRecord> trials;
};

struct ConditionSummary {
  std::string participant;  // empty for grand means
  Block block = Block::no_correction;
  TaskCondition condition;
  double er = 0.0;       // first-click miss proportion
  double mean_mt = 0.0;  // ms over error-free targets; NaN when there are none
  std::size_t n_trials = 0;
  std::size_t n_errors = 0;
  std::size_t n_participants = 1;
};

struct SessionRejection {
  std::string participant;
  Block block = Block::no_correction;
  std::size_t session = 0;
  std::string reason;
};

struct AggregateResult {
  /// Keyed by (participant, block, condition), sorted by that key.
  std::vector<ConditionSummary> per_participant;
  /// Keyed by (block, condition): mean of participant means, pooled ER.
  std::vector<ConditionSummary> grand_means;
  std::vector<SessionRejection> rejected;
};

/// Measured MT of one target: first-click time minus the previous success.
struct TargetMeasure {
  std::size_t trial_index = 0;
  double mt = 0.0;
  bool first_click_hit = false;
};

/// Validates a session and extracts one measure per measured target.
/// Throws DomainError with the rejection reason.
std::vector<TargetMeasure> measure_session(const SessionLog& log);

/// Folds sessions into condition summaries. No outlier removal. Practice
/// sessions are skipped; invalid sessions are rejected with a reason.
AggregateResult aggregate(const std::vector<SessionLog>& logs);

}  // namespace blurfitts
