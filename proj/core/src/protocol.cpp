#include "blurfitts/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <tuple>

namespace blurfitts {

double distance(Point p, Point q) noexcept { return std::hypot(p.x - q.x, p.y - q.y); }

std::vector<std::size_t> click_order(std::size_t n) {
  if (n < 3 || n % 2 == 0) throw DomainError("target count must be odd and >= 3");
  const std::size_t step = (n + 1) / 2;
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = (k * step) % n;
  return order;
}

TargetLayout generate_layout(std::size_t n, double A, double W, Point screen_center,
                             std::optional<ScreenBounds> bounds, std::optional<double> B) {
  if (!(A > 0.0) || !(W > 0.0)) throw DomainError("layout requires A > 0 and W > 0");
  TargetLayout layout;
  layout.n_targets = n;
  layout.A = A;
  layout.W = W;
  layout.B = B;
  layout.order = click_order(n);
  layout.circle_center = screen_center;

  const double step = static_cast<double>((n + 1) / 2);
  const double pi = std::numbers::pi;
  layout.circle_diameter = A / std::sin(pi * step / static_cast<double>(n));
  const double radius = 0.5 * layout.circle_diameter;

  // Slot 0 sits at the top of the circle; slots advance clockwise on screen.
  layout.centers.reserve(n);
  for (std::size_t slot : layout.order) {
    const double angle = 2.0 * pi * static_cast<double>(slot) / static_cast<double>(n);
    layout.centers.push_back(
        {screen_center.x + radius * std::sin(angle), screen_center.y - radius * std::cos(angle)});
  }

  if (bounds) {
    const double extent = radius + 0.5 * W;
    if (screen_center.x - extent < 0.0 || screen_center.x + extent > bounds->width ||
        screen_center.y - extent < 0.0 || screen_center.y + extent > bounds->height)
      layout.warnings.push_back("layout extends beyond the " + std::to_string(bounds->width) +
                                " x " + std::to_string(bounds->height) + " screen");
  }
  return layout;
}

bool is_hit(Point click, Point center, double W) noexcept {
  return distance(click, center) <= 0.5 * W;
}

std::vector<std::size_t> latin_square_order(std::size_t k, std::size_t participant_index) {
  if (k == 0) throw DomainError("Latin square needs at least one condition");
  const std::size_t row = participant_index % k;
  std::vector<std::size_t> order(k);
  for (std::size_t p = 0; p < k; ++p) order[p] = (row + p) % k;
  return order;
}

std::string_view to_string(Block block) noexcept {
  return block == Block::no_correction ? "nc" : "c";
}

Block parse_block(std::string_view text) {
  if (text == "nc") return Block::no_correction;
  if (text == "c") return Block::correction;
  throw DomainError("block must be 'nc' or 'c', got '" + std::string(text) + "'");
}

std::vector<TargetMeasure> measure_session(const SessionLog& log) {
  const auto& trials = log.trials;
  if (trials.empty()) throw DomainError("session has no clicks");
  if (trials.front().trial_index != 0) throw DomainError("missing start target");

  std::vector<TargetMeasure> measures;
  std::optional<double> previous_success;
  std::size_t current = 0;
  int expected_attempt = 1;

  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    if (t.condition != log.condition)
      throw DomainError("click " + std::to_string(i) + " belongs to a different condition");
    if (i > 0 && t.click_time < trials[i - 1].click_time)
      throw DomainError("non-monotone timestamps at click " + std::to_string(i));
    if (t.trial_index != current)
      throw DomainError("target " + std::to_string(current) + " was never hit");
    if (t.attempt != expected_attempt)
      throw DomainError("attempt numbering broken at click " + std::to_string(i));

    if (t.attempt == 1 && current > 0)
      measures.push_back({current, t.click_time - *previous_success, t.hit});

    if (t.hit) {
      previous_success = t.click_time;
      ++current;
      expected_attempt = 1;
    } else {
      ++expected_attempt;
    }
  }
  if (!previous_success) throw DomainError("start target was never hit");
  if (expected_attempt != 1)
    throw DomainError("target " + std::to_string(current) + " was never hit");
  return measures;
}

AggregateResult aggregate(const std::vector<SessionLog>& logs) {
  using Key = std::tuple<std::string, Block, TaskCondition>;
  // (session, trial, mt, hit) per group, sorted before folding so the result
  // does not depend on the order sessions arrive in.
  using Entry = std::tuple<std::size_t, std::size_t, double, bool>;
  std::map<Key, std::vector<Entry>> groups;

  AggregateResult result;
  for (const auto& log : logs) {
    if (log.practice) continue;
    try {
      for (const auto& m : measure_session(log))
        groups[{log.participant, log.block, log.condition}].emplace_back(
            log.session, m.trial_index, m.mt, m.first_click_hit);
    } catch (const DomainError& e) {
      result.rejected.push_back({log.participant, log.block, log.session, e.what()});
    }
  }
  std::sort(result.rejected.begin(), result.rejected.end(), [](const auto& x, const auto& y) {
    return std::tie(x.participant, x.block, x.session, x.reason) <
           std::tie(y.participant, y.block, y.session, y.reason);
  });

  for (auto& [key, entries] : groups) {
    std::sort(entries.begin(), entries.end());
    ConditionSummary s;
    std::tie(s.participant, s.block, s.condition) = key;
    double mt_sum = 0.0;
    std::size_t n_hits = 0;
    for (const auto& [session, trial, mt, hit] : entries) {
      ++s.n_trials;
      if (hit) {
        mt_sum += mt;
        ++n_hits;
      } else {
        ++s.n_errors;
      }
    }
    s.er = s.n_trials ? static_cast<double>(s.n_errors) / static_cast<double>(s.n_trials) : 0.0;
    s.mean_mt = n_hits ? mt_sum / static_cast<double>(n_hits) : std::nan("");
    result.per_participant.push_back(std::move(s));
  }

  std::map<std::pair<Block, TaskCondition>, std::vector<const ConditionSummary*>> by_condition;
  for (const auto& s : result.per_participant) by_condition[{s.block, s.condition}].push_back(&s);
  for (const auto& [key, members] : by_condition) {
    ConditionSummary g;
    g.block = key.first;
    g.condition = key.second;
    g.n_participants = members.size();
    double mt_sum = 0.0;
    std::size_t with_mt = 0;
    for (const auto* m : members) {
      g.n_trials += m->n_trials;
      g.n_errors += m->n_errors;
      if (!std::isnan(m->mean_mt)) {
        mt_sum += m->mean_mt;
        ++with_mt;
      }
    }
    g.er = g.n_trials ? static_cast<double>(g.n_errors) / static_cast<double>(g.n_trials) : 0.0;
    g.mean_mt = with_mt ? mt_sum / static_cast<double>(with_mt) : std::nan("");
    result.grand_means.push_back(std::move(g));
  }
  return result;
}

}  // namespace blurfitts
