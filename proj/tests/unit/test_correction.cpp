#include <cmath>
#include <random>

#include "blurfitts/correction.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace blurfitts;

namespace {

const AbShiftParams reported{56.8, 200, 0.0738, 1.88};
const ModelSpec ab_spec{ModelKind::one_part_ab_shift};

}  // namespace

TEST_CASE("closed-form width correction") {
  CHECK(std::abs(delta_w_closed_form(reported, {300, 18, 101}) - 18.66) <= 0.01);
  CHECK(std::abs(delta_w_closed_form(reported, {500, 78, 21}) - 7.34) <= 0.01);
  CHECK(delta_w_closed_form(reported, {300, 18, 1}) == 0.0);
  CHECK(delta_w_closed_form({1, 2, 3, 4}, {123, 45, 1}) == 0.0);
  CHECK_THROWS_AS(delta_w_closed_form(reported, {0, 18, 21}), DomainError);
}

TEST_CASE("numeric width correction") {
  CHECK(std::abs(delta_w_numeric(reported, {300, 18, 101}) - delta_w_closed_form(reported, {300, 18, 101})) <= 1e-4);
  CHECK(std::abs(delta_w_numeric(reported, {300, 18, 101}) - 18.66) <= 0.01);
  CHECK(std::abs(delta_w_numeric(reported, {300, 18, 1})) <= 1e-9);
  // A distance shift so large that no width inside the bracket restores the baseline.
  CHECK_THROWS_AS(delta_w_numeric({0, 200, 0.0, 5000.0}, {300, 18, 101}), SolverError);
}

TEST_CASE("closed form and bisection agree on a randomized grid") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> a(0, 300), b(1, 400), c(0, 0.2), d(0, 5), A(50, 2000), W(5, 200);
  std::uniform_int_distribution<int> half(0, 100);
  int checked = 0;
  while (checked < 1000) {
    const AbShiftParams p{a(rng), b(rng), c(rng), d(rng)};
    const TaskCondition cond{A(rng), W(rng), 2.0 * half(rng) + 1};
    const double closed = delta_w_closed_form(p, cond);
    const double numeric = delta_w_numeric(p, cond);
    CHECK(std::abs(closed - numeric) <= 1e-6);
    ++checked;
  }
}

TEST_CASE("width correction equalizes predicted MT") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> a(0, 300), b(1, 400), c(0, 0.2), d(0, 5), A(50, 2000), W(5, 200);
  std::uniform_int_distribution<int> half(0, 100);
  for (int i = 0; i < 1000; ++i) {
    const AbShiftParams p{a(rng), b(rng), c(rng), d(rng)};
    const TaskCondition cond{A(rng), W(rng), 2.0 * half(rng) + 1};
    const double dw = delta_w_closed_form(p, cond);
    const double shrink = p.c * (cond.B - 1);
    if (cond.W + dw - shrink <= 0) continue;
    const double fixed = predict_mt(ab_spec, p.to_params(), {cond.A, cond.W + dw, cond.B}).value;
    const double base = predict_mt(ab_spec, p.to_params(), {cond.A, cond.W, 1}).value;
    CHECK(std::abs(fixed - base) <= 1e-6);
  }
}

TEST_CASE("corrections are linear in B - 1") {
  const TaskCondition at21{500, 36, 21};
  const TaskCondition at81{500, 36, 81};
  CHECK(delta_w_closed_form(reported, at81) == doctest::Approx(4 * delta_w_closed_form(reported, at21)).epsilon(1e-12));
  CHECK(delta_a(reported, at81) == doctest::Approx(4 * delta_a(reported, at21)).epsilon(1e-12));
}

TEST_CASE("distance-only correction") {
  CHECK(std::abs(delta_a(reported, {300, 18, 101}) - 311.0) <= 0.1);
  CHECK(std::abs(delta_a(reported, {1100, 78, 21}) - 58.42) <= 0.05);
  CHECK(delta_a(reported, {1100, 78, 1}) == 0.0);
  CHECK_THROWS_AS(delta_a(reported, {300, 0, 21}), DomainError);
}

TEST_CASE("joint correction") {
  const TaskCondition cond{300, 18, 101};
  CHECK(delta_w_given_delta_a(reported, cond, 0.0) == delta_w_closed_form(reported, cond));
  CHECK(std::abs(delta_w_given_delta_a(reported, cond, 100.0) - 12.66) <= 0.01);
  CHECK_THROWS_AS(delta_w_given_delta_a(reported, {0, 18, 101}, 10.0), DomainError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> A(200, 2000), W(20, 200), frac(0, 0.5);
  std::uniform_int_distribution<int> half(0, 50);
  for (int i = 0; i < 500; ++i) {
    const TaskCondition c{A(rng), W(rng), 2.0 * half(rng) + 1};
    const double da = frac(rng) * c.A;
    const double dw = delta_w_given_delta_a(reported, c, da);
    const double lhs = c.A / c.W;
    const double rhs = (c.A - da + reported.d * (c.B - 1)) / (c.W + dw - reported.c * (c.B - 1));
    CHECK(std::abs(lhs - rhs) <= 1e-9 * lhs);
  }

  // A full distance correction already restores the ratio, so no width change is left.
  const TaskCondition big{1100, 78, 21};
  const double full = delta_a(reported, big);
  const double dw = delta_w_given_delta_a(reported, big, full);
  CHECK(std::abs(dw) <= 1e-9);
  const double a_prime = big.A - full;
  CHECK(big.W + dw - reported.c * 20 ==
        doctest::Approx(big.W * (a_prime + reported.d * 20) / big.A).epsilon(1e-12));
}

TEST_CASE("correct_condition policies") {
  const auto params = reported.to_params();
  const auto width = correct_condition(ab_spec, params, {300, 18, 101}, CorrectionPolicy::width_only());
  CHECK(width.corrected_W == doctest::Approx(36.66).epsilon(0.01 / 36.66));
  CHECK(width.rounded_W == 37);
  CHECK(width.delta_a == 0.0);
  CHECK(width.corrected_A == 300.0);
  CHECK(width.feasible);
  CHECK(width.corrected_W == 18.0 + width.delta_w);

  const auto none = correct_condition(ab_spec, params, {300, 18.5, 1}, CorrectionPolicy::width_only());
  CHECK(none.corrected_W == 18.5);
  CHECK(none.rounded_W == 19);

  const auto dist = correct_condition(ab_spec, params, {300, 18, 101}, CorrectionPolicy::distance_only());
  CHECK_FALSE(dist.feasible);
  CHECK(dist.corrected_A == doctest::Approx(-11.0).epsilon(0.01));
  CHECK(dist.corrected_A == 300.0 - dist.delta_a);

  const auto joint = correct_condition(ab_spec, params, {300, 18, 101}, CorrectionPolicy::joint(100));
  CHECK(joint.feasible);
  CHECK(joint.corrected_A == 200.0);
  CHECK(std::abs(joint.delta_w - 12.66) <= 0.01);
}

TEST_CASE("corrections require the A-shift/W-shrink one-part model") {
  for (ModelKind kind : all_model_kinds) {
    if (kind == ModelKind::one_part_ab_shift) continue;
    CHECK_THROWS_AS(correct_condition({kind}, blurfitts::testing::table_constants(kind), {300, 18, 101},
                                      CorrectionPolicy::width_only()),
                    UnsupportedModelError);
    CHECK_THROWS_AS(AbShiftParams::from({kind}, blurfitts::testing::table_constants(kind)),
                    UnsupportedModelError);
  }
}
