#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "blurfitts/simulator.hpp"
#include "blurfitts/stats.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace blurfitts;

namespace {

const nlohmann::json& reference() {
  static const nlohmann::json values = blurfitts::testing::load_reference_values();
  return values;
}

/// Straight transcription of the step-down definition, O(m^2).
std::vector<double> holm_brute_force(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return p[x] < p[y]; });
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double best = 0;
    for (std::size_t j = 0; j <= i; ++j) best = std::max(best, std::min(1.0, static_cast<double>(m - j) * p[idx[j]]));
    out[idx[i]] = best;
  }
  return out;
}

std::vector<ConditionSummary> synthetic_summaries(std::size_t n_participants, std::uint64_t seed,
                                                  double noise_sd) {
  SyntheticUser base;
  base.truth_spec = {ModelKind::one_part_ab_shift};
  base.truth_params = blurfitts::testing::table_constants(ModelKind::one_part_ab_shift);
  base.mt_noise_sd = noise_sd;
  base.endpoint_spread_ratio = 0.15;
  std::vector<SessionLog> logs;
  for (std::size_t i = 0; i < n_participants; ++i) {
    SyntheticUser u = base;
    u.participant = "S" + std::to_string(i + 1);
    u.seed = derive_seed(seed, i);
    auto part = simulate_experiment(u, experiment2_design(), {15, 1, Block::correction, {}});
    logs.insert(logs.end(), part.begin(), part.end());
  }
  return aggregate(logs).per_participant;
}

}  // namespace

TEST_CASE("Student t cdf matches reference values") {
  for (const auto& row : reference()["t_cdf"]) {
    CAPTURE(row.dump());
    CHECK(std::abs(student_t_cdf(row["t"], row["df"]) - row["cdf"].get<double>()) <= 1e-12);
  }
  for (const auto& row : reference()["t_upper_quantile"]) {
    CAPTURE(row.dump());
    CHECK(student_t_upper_quantile(row["alpha"], row["df"]) == doctest::Approx(row["q"].get<double>()).epsilon(1e-10));
  }
}

TEST_CASE("paired TOST matches reference values") {
  for (const auto& row : reference()["tost"]) {
    CAPTURE(row.dump());
    const auto diffs = row["diffs"].get<std::vector<double>>();
    const auto r = paired_tost(diffs, row["dz"]);
    CHECK(r.bound == doctest::Approx(row["bound"].get<double>()).epsilon(1e-12));
    CHECK(r.t_lower == doctest::Approx(row["t_lower"].get<double>()).epsilon(1e-10));
    CHECK(r.t_upper == doctest::Approx(row["t_upper"].get<double>()).epsilon(1e-10));
    CHECK(std::abs(r.p_lower - row["p_lower"].get<double>()) <= 1e-10);
    CHECK(std::abs(r.p_upper - row["p_upper"].get<double>()) <= 1e-10);
    CHECK(std::abs(r.p_tost - row["p_tost"].get<double>()) <= 1e-10);
  }
}

TEST_CASE("TOST on a symmetric small sample") {
  const std::vector<double> diffs{1, -1, 2, -2, 0, 0};
  const auto r = paired_tost(diffs);
  CHECK(r.mean_diff == 0.0);
  CHECK(r.sd_diff == doctest::Approx(1.414).epsilon(0.001));
  CHECK(r.bound == doctest::Approx(0.283).epsilon(0.002));
  CHECK(std::abs(r.t_lower - 0.49) <= 0.005);
  CHECK(std::abs(r.t_upper + 0.49) <= 0.005);
  CHECK(std::abs(r.p_tost - 0.32) <= 0.005);
  CHECK_FALSE(r.equivalent);
  CHECK(r.p_tost >= std::min(r.p_lower, r.p_upper));
  CHECK(r.p_tost <= 1.0);
}

TEST_CASE("a shift far outside the bound is not equivalent") {
  std::vector<double> diffs{9, 11, 10, 8, 12, 10};
  const auto r = paired_tost(diffs);
  CHECK(r.mean_diff > 5 * r.sd_diff);
  CHECK_FALSE(r.equivalent);
}

TEST_CASE("with dz 0.2 and six participants equivalence is unreachable") {
  CHECK(tost_max_statistic(6, 0.2) == doctest::Approx(0.2 * std::sqrt(6.0)).epsilon(1e-14));
  CHECK(std::abs(student_t_upper_quantile(0.05, 5) - 2.015) <= 0.001);
  CHECK_FALSE(tost_can_reach_equivalence(6, 0.2, 0.05));
  CHECK(tost_can_reach_equivalence(200, 0.2, 0.05));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0, 1);
  std::uniform_real_distribution<double> shift(-3, 3);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> d(6);
    const double mu = shift(rng);
    for (auto& x : d) x = mu + noise(rng);
    const auto r = paired_tost(d);
    CHECK_FALSE(r.equivalent);
    // The smaller of the two one-sided statistics never exceeds dz * sqrt(n).
    CHECK(std::min(r.t_lower, -r.t_upper) <= tost_max_statistic(6, 0.2) + 1e-12);
  }
}

TEST_CASE("TOST is invariant to permutation and positive scaling") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(5, 20);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> d(8);
    for (auto& x : d) x = noise(rng);
    const auto base = paired_tost(d);
    auto shuffled = d;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm = paired_tost(shuffled);
    CHECK(perm.p_tost == doctest::Approx(base.p_tost).epsilon(1e-12));
    auto scaled = d;
    for (auto& x : scaled) x *= 37.5;
    const auto sc = paired_tost(scaled);
    CHECK(sc.t_lower == doctest::Approx(base.t_lower).epsilon(1e-10));
    CHECK(sc.t_upper == doctest::Approx(base.t_upper).epsilon(1e-10));
    CHECK(sc.p_tost == doctest::Approx(base.p_tost).epsilon(1e-10));
    CHECK(sc.bound == doctest::Approx(37.5 * base.bound).epsilon(1e-12));
  }
}

TEST_CASE("TOST input errors") {
  CHECK_THROWS_AS(paired_tost(std::vector<double>{3, 3, 3}), DegenerateVarianceError);
  CHECK_THROWS_AS(paired_tost(std::vector<double>{3}), DomainError);
  CHECK_THROWS_AS(paired_tost(std::vector<double>{}), DomainError);
}

TEST_CASE("Holm adjustment") {
  const auto small = holm_correct(std::vector<double>{0.01, 0.02, 0.03});
  CHECK(small[0] == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(small[1] == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(small[2] == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(holm_correct(std::vector<double>{0.2}) == std::vector<double>{0.2});
  CHECK(holm_correct(std::vector<double>{1, 1, 1, 1}) == std::vector<double>{1, 1, 1, 1});
  CHECK(holm_correct(std::vector<double>{}).empty());
  CHECK_THROWS_AS(holm_correct(std::vector<double>{0.5, 1.2}), DomainError);
  CHECK_THROWS_AS(holm_correct(std::vector<double>{-0.1}), DomainError);
  CHECK_THROWS_AS(holm_correct(std::vector<double>{std::nan("")}), DomainError);

  for (const auto& row : reference()["holm"]) {
    const auto p = row["p"].get<std::vector<double>>();
    const auto want = row["adjusted"].get<std::vector<double>>();
    const auto got = holm_correct(p);
    const auto brute = holm_brute_force(p);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::abs(got[i] - want[i]) <= 1e-10);
      CHECK(std::abs(got[i] - brute[i]) <= 1e-15);
    }
  }
}

TEST_CASE("Holm output is monotone in raw p") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 0.2);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> p(1 + i % 40);
    for (auto& x : p) x = u(rng);
    const auto adj = holm_correct(p);
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    for (std::size_t k = 1; k < idx.size(); ++k) CHECK(adj[idx[k]] >= adj[idx[k - 1]]);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(adj[k] >= p[k]);
    const auto brute = holm_brute_force(p);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(adj[k] == brute[k]);
  }
}

TEST_CASE("equivalence battery over the second experiment's grid") {
  const auto summaries = synthetic_summaries(6, 2024, 60.0);
  const auto report = equivalence_battery(summaries);
  CHECK(report.tests.size() == 40);
  CHECK(report.complete);
  CHECK(report.missing.empty());
  CHECK(report.n_equivalent == 0);
  for (const auto& t : report.tests) {
    CHECK(t.participants.size() == 6);
    CHECK(t.B != 1.0);
    REQUIRE(t.result.has_value());
    REQUIRE(t.p_adjusted.has_value());
    CHECK(*t.p_adjusted >= t.result->p_tost);
  }
}

TEST_CASE("battery surfaces degenerate variance per test") {
  std::vector<ConditionSummary> summaries;
  for (const char* who : {"S1", "S2", "S3"})
    for (const auto& c : experiment2_design())
      summaries.push_back({who, Block::correction, c, 0.0, 700.0 + c.A / 10, 15, 0, 1});
  const auto report = equivalence_battery(summaries);
  CHECK(report.tests.size() == 40);
  for (const auto& t : report.tests) {
    CHECK_FALSE(t.result.has_value());
    REQUIRE(t.error.has_value());
    CHECK_FALSE(t.equivalent);
  }
  CHECK(report.n_equivalent == 0);
}

TEST_CASE("battery lists missing cells") {
  auto summaries = synthetic_summaries(4, 6, 50.0);
  std::erase_if(summaries, [](const ConditionSummary& s) {
    return s.participant == "S2" && s.condition == TaskCondition{300, 12, 41};
  });
  const auto report = equivalence_battery(summaries);
  CHECK_FALSE(report.complete);
  CHECK_FALSE(report.missing.empty());

  auto mixed = synthetic_summaries(2, 7, 50.0);
  mixed.front().block = Block::no_correction;
  CHECK_THROWS(equivalence_battery(mixed));
}
