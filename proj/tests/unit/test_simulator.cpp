#include <cmath>

#include "blurfitts/fitting.hpp"
#include "blurfitts/simulator.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace blurfitts;
using blurfitts::testing::table_constants;

namespace {

SyntheticUser ab_shift_user(double noise, double spread, std::uint64_t seed) {
  SyntheticUser u;
  u.truth_spec = {ModelKind::one_part_ab_shift};
  u.truth_params = table_constants(ModelKind::one_part_ab_shift);
  u.mt_noise_sd = noise;
  u.endpoint_spread_ratio = spread;
  u.seed = seed;
  return u;
}

bool same_log(const SessionLog& x, const SessionLog& y) {
  if (x.trials.size() != y.trials.size() || x.condition != y.condition) return false;
  for (std::size_t i = 0; i < x.trials.size(); ++i) {
    const auto& a = x.trials[i];
    const auto& b = y.trials[i];
    if (a.click_time != b.click_time || !(a.click_point == b.click_point) || a.hit != b.hit ||
        a.attempt != b.attempt || a.trial_index != b.trial_index)
      return false;
  }
  return true;
}

double pooled_er(double spread, double B, double W) {
  std::size_t trials = 0, errors = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SessionTally tally;
    for (double A : {300.0, 500.0})
      simulate_session(ab_shift_user(0, spread, seed), {A, W, B}, {}, &tally);
    trials += tally.n_trials;
    errors += tally.n_errors;
  }
  return static_cast<double>(errors) / static_cast<double>(trials);
}

}  // namespace

TEST_CASE("noiseless sessions reproduce the truth model") {
  const auto user = ab_shift_user(0, 0, 1);
  for (const auto& cond : experiment1_design()) {
    const auto log = simulate_session(user, cond);
    const auto measures = measure_session(log);
    REQUIRE(measures.size() == 21);
    const double want = predict_mt(user.truth_spec, user.truth_params, cond).value;
    for (const auto& m : measures) {
      CHECK(m.first_click_hit);
      CHECK(std::abs(m.mt - want) <= 1e-9);
    }
  }
  const auto result = aggregate(simulate_experiment(user, experiment1_design()));
  for (const auto& s : result.per_participant) {
    CHECK(s.er == 0.0);
    CHECK(std::abs(s.mean_mt - predict_mt(user.truth_spec, user.truth_params, s.condition).value) <= 1e-9);
  }
}

TEST_CASE("same seed gives identical logs") {
  const auto user = ab_shift_user(50, 0.3, 77);
  const auto a = simulate_experiment(user, experiment1_design());
  const auto b = simulate_experiment(user, experiment1_design());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_log(a[i], b[i]));

  const auto other = simulate_experiment(ab_shift_user(50, 0.3, 78), experiment1_design());
  CHECK_FALSE(same_log(a[5], other[5]));
}

TEST_CASE("dropping a condition leaves the other sessions unchanged") {
  const auto user = ab_shift_user(50, 0.3, 9);
  auto design = experiment1_design();
  const auto full = simulate_experiment(user, design);
  design.erase(design.begin() + 7);
  const auto partial = simulate_experiment(user, design);
  for (std::size_t i = 0, j = 0; i < full.size(); ++i) {
    if (i == 7) continue;
    CHECK(same_log(full[i], partial[j++]));
  }
}

TEST_CASE("first experiment has 48 sessions and 1008 measured trials") {
  const auto logs = simulate_experiment(ab_shift_user(30, 0.2, 1), experiment1_design());
  CHECK(logs.size() == 48);
  std::size_t measured = 0;
  for (const auto& log : logs) measured += measure_session(log).size();
  CHECK(measured == 1008);
  CHECK(simulate_experiment(ab_shift_user(30, 0.2, 1), {}).empty());
  CHECK(experiment2_design().size() == 48);
}

TEST_CASE("aggregation matches the simulator's own counts") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const auto& cond : experiment1_design()) {
      SessionTally tally;
      const auto log = simulate_session(ab_shift_user(80, 0.3, seed), cond, {}, &tally);
      const auto s = aggregate({log}).per_participant.at(0);
      CHECK(s.n_trials == tally.n_trials);
      CHECK(s.n_errors == tally.n_errors);
      CHECK(s.n_trials - s.n_errors == tally.n_error_free);
      if (tally.n_error_free > 0)
        CHECK(s.mean_mt == tally.error_free_mt_sum / static_cast<double>(tally.n_error_free));
    }
  }
}

TEST_CASE("error rate rises with blur on the smallest target") {
  CHECK(pooled_er(0.25, 101, 12) > pooled_er(0.25, 1, 12));
}

TEST_CASE("error rate rises with endpoint spread") {
  double previous = -1;
  for (double spread : {0.0, 0.1, 0.2, 0.3, 0.4}) {
    const double er = pooled_er(spread, 41, 18);
    CHECK(er >= previous);
    previous = er;
  }
}

TEST_CASE("MT floor and retry delay") {
  SyntheticUser u;
  u.truth_spec = {ModelKind::one_part};
  u.truth_params = {-1000, 10, {}, {}, {}};
  const auto log = simulate_session(u, {300, 18, 1});
  for (const auto& m : measure_session(log)) CHECK(m.mt == min_movement_time_ms);

  const auto noisy = simulate_session(ab_shift_user(0, 0.6, 4), {300, 12, 101});
  bool saw_retry = false;
  for (std::size_t i = 1; i < noisy.trials.size(); ++i) {
    if (noisy.trials[i].attempt > 1) {
      saw_retry = true;
      CHECK(noisy.trials[i].click_time - noisy.trials[i - 1].click_time == doctest::Approx(retry_delay_ms));
    }
  }
  CHECK(saw_retry);
}

TEST_CASE("infeasible truth refuses to simulate") {
  SyntheticUser u = ab_shift_user(0, 0, 1);
  u.truth_params.c = 0.15;
  CHECK_THROWS_AS(simulate_session(u, {300, 12, 101}), EffectiveWidthError);
  u = ab_shift_user(-1, 0, 1);
  CHECK_THROWS_AS(simulate_session(u, {300, 18, 1}), DomainError);
}

TEST_CASE("noiseless pipeline recovers the truth constants") {
  const auto user = ab_shift_user(0, 0, 3);
  const auto result = aggregate(simulate_experiment(user, experiment1_design()));
  Dataset data;
  for (const auto& g : result.grand_means) data.points.push_back({g.condition, g.mean_mt, g.n_trials});
  const auto report = fit(user.truth_spec, data);
  CHECK(blurfitts::testing::max_relative_param_error(report.params, user.truth_params) <= 1e-3);
}

TEST_CASE("derived seeds differ per participant") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
