#include "blurfitts/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace blurfitts {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

std::uint64_t session_seed(const SyntheticUser& user, const TaskCondition& cond,
                           const SessionOptions& options) {
  std::uint64_t h = splitmix64(user.seed);
  h = mix(h, std::bit_cast<std::uint64_t>(cond.A));
  h = mix(h, std::bit_cast<std::uint64_t>(cond.W));
  h = mix(h, std::bit_cast<std::uint64_t>(cond.B));
  h = mix(h, static_cast<std::uint64_t>(options.block));
  h = mix(h, options.session);
  h = mix(h, std::bit_cast<std::uint64_t>(options.rendered_width.value_or(0.0)));
  return h;
}

}  // namespace

SessionLog simulate_session(const SyntheticUser& user, const TaskCondition& cond,
                            const SessionOptions& options, SessionTally* tally) {
  if (user.mt_noise_sd < 0.0 || user.endpoint_spread_ratio < 0.0)
    throw DomainError("noise SD and endpoint spread ratio must be non-negative");

  const double width = options.rendered_width.value_or(cond.W);
  const TaskCondition rendered{cond.A, width, cond.B};
  const double mt_mean = predict_mt(user.truth_spec, user.truth_params, rendered).value;
  const double eff_width = model_effective_width(user.truth_spec, user.truth_params, rendered);
  if (!(eff_width > 0.0))
    throw EffectiveWidthError(EffectiveWidthError::Term::width, eff_width);
  const double endpoint_sd = user.endpoint_spread_ratio * width * (width / eff_width);

  std::mt19937_64 rng(session_seed(user, cond, options));
  std::normal_distribution<double> standard_normal(0.0, 1.0);

  const auto layout = generate_layout(options.n_targets, cond.A, width, options.screen_center);

  SessionLog log;
  log.participant = user.participant;
  log.block = options.block;
  log.condition = cond;
  log.session = options.session;

  // The start target is clicked dead-center at t = 0.
  double t = 0.0;
  double last_success = t;
  log.trials.push_back({cond, 0, t, layout.centers[0], layout.centers[0], true, 1});

  for (std::size_t k = 1; k <= options.n_targets; ++k) {
    const Point center = layout.centers[k % options.n_targets];
    double mt = mt_mean;
    if (user.mt_noise_sd > 0.0) mt += user.mt_noise_sd * standard_normal(rng);
    mt = std::max(min_movement_time_ms, mt);
    t += mt;

    for (int attempt = 1;; ++attempt) {
      if (attempt > 1) t += retry_delay_ms;
      Point click = center;
      if (endpoint_sd > 0.0 && attempt < options.max_attempts) {
        click.x += endpoint_sd * standard_normal(rng);
        click.y += endpoint_sd * standard_normal(rng);
      }
      const bool hit = is_hit(click, center, width);
      log.trials.push_back({cond, k, t, click, center, hit, attempt});

      if (attempt == 1 && tally) {
        ++tally->n_trials;
        if (hit) {
          tally->error_free_mt_sum += t - last_success;
          ++tally->n_error_free;
        } else {
          ++tally->n_errors;
        }
      }
      if (hit) {
        last_success = t;
        break;
      }
    }
  }
  return log;
}

std::vector<SessionLog> simulate_experiment(const SyntheticUser& user,
                                            const std::vector<TaskCondition>& design,
                                            const ExperimentOptions& options) {
  std::vector<SessionLog> logs;
  logs.reserve(design.size() * options.sessions_per_condition);
  std::size_t session = 0;
  for (const auto& cond : design) {
    for (std::size_t rep = 0; rep < options.sessions_per_condition; ++rep) {
      SessionOptions so;
      so.n_targets = options.n_targets;
      so.block = options.block;
      so.session = rep;
      if (auto it = options.rendered_widths.find(cond); it != options.rendered_widths.end())
        so.rendered_width = it->second;
      auto log = simulate_session(user, cond, so);
      log.session = session++;
      logs.push_back(std::move(log));
    }
  }
  return logs;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix(splitmix64(base), index);
}

std::vector<TaskCondition> factorial_design(const std::vector<double>& As,
                                            const std::vector<double>& Ws,
                                            const std::vector<double>& Bs) {
  std::vector<TaskCondition> out;
  out.reserve(As.size() * Ws.size() * Bs.size());
  for (double A : As)
    for (double W : Ws)
      for (double B : Bs) out.push_back({A, W, B});
  return out;
}

std::vector<TaskCondition> experiment1_design() {
  return factorial_design({300, 500}, {12, 18, 36, 78}, {1, 21, 41, 61, 81, 101});
}

std::vector<TaskCondition> experiment2_design() {
  return factorial_design({300, 1100}, {12, 18, 36, 78}, {1, 21, 41, 61, 81, 101});
}

}  // namespace blurfitts
