#include <gtest/gtest.h>

#include <cmath>

#include "microswim/environment.hpp"
#include "microswim/swimmer.hpp"
#include "purcell_reference.hpp"

using namespace microswim;

namespace {

constexpr double kDmax = M_PI / 6;

PurcellVelocity sum(const PurcellVelocity& a, const PurcellVelocity& b, double x, double y) {
  return {x * a.u + y * b.u, x * a.v + y * b.v, x * a.ddc + y * b.ddc};
}

}  // namespace

TEST(Types, ActionIdsRoundTrip) {
  for (int id = 0; id < kNumActionIds; ++id) EXPECT_EQ(action_id(action_from_id(id)), id);
  EXPECT_EQ(action_id(Action{2, -1}), 3);
  EXPECT_EQ(action_id(Action{2, 0}), 4);
  EXPECT_EQ(Action(Action{1, 0}), Action(Action{2, 0}));
  EXPECT_NE(Action(Action{1, 1}), Action(Action{2, 1}));
}

TEST(Types, FormatAction) {
  EXPECT_EQ(format_action({1, 1}), "DOF 1 ROC +1");
  EXPECT_EQ(format_action({2, -1}), "DOF 2 ROC -1");
  EXPECT_EQ(format_action(Action::null()), "DOF 1 ROC 0");
}

TEST(Types, CornerGrayOrder) {
  for (int id = 0; id < 4; ++id) EXPECT_EQ(Corner::from_id(id).id(), id);
  EXPECT_EQ(Corner::from_id(1), (Corner{false, true}));
  EXPECT_EQ(Corner::from_id(3), (Corner{true, false}));
  // Adjacent ids differ in one DOF.
  for (int id = 0; id < 4; ++id) {
    const Corner a = Corner::from_id(id), b = Corner::from_id((id + 1) % 4);
    EXPECT_EQ((a.d1_high != b.d1_high) + (a.d2_high != b.d2_high), 1);
  }
  EXPECT_THROW(apply_action(Corner{true, false}, {1, +1}), InvalidActionError);
}

TEST(Types, ParamValidation) {
  EXPECT_NO_THROW(validate(Model::purcell, ModelParams::purcell_defaults()));
  EXPECT_NO_THROW(validate(Model::ng, ModelParams::ng_defaults()));
  EXPECT_THROW(validate(Model::purcell, {M_PI / 2, 0, 200}), ConfigError);
  EXPECT_THROW(validate(Model::purcell, {0, 0, 200}), ConfigError);
  EXPECT_THROW(validate(Model::ng, {8, 10, 200}), ConfigError);
  EXPECT_THROW(validate(Model::ng, {10, 0, 200}), ConfigError);
  EXPECT_THROW(validate(Model::ng, {10, 8, 0}), ConfigError);
  EXPECT_THROW(parse_model("scallop"), ConfigError);
  EXPECT_EQ(parse_direction("-x"), Direction::neg_x);
}

TEST(PurcellDelta, StraightValue) { EXPECT_DOUBLE_EQ(purcell_delta(0, 0), 1944.0); }

TEST(PurcellDelta, SymmetricInAngles) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double a = M_PI * rng.symmetric(), b = M_PI * rng.symmetric();
    EXPECT_NEAR(purcell_delta(a, b), purcell_delta(b, a), 1e-11);
  }
}

TEST(PurcellDelta, MatchesLiteralTranscription) {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const double a = M_PI * rng.symmetric(), b = M_PI * rng.symmetric();
    EXPECT_NEAR(purcell_delta(a, b), support::reference_delta(a, b), 1e-10);
  }
  EXPECT_GT(purcell_delta(0.5236, -0.5236), 0.0);
}

TEST(PurcellDelta, PositiveOverAllowedRange) {
  const double lim = M_PI / 3;
  double lowest = INFINITY;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j)
      lowest = std::min(lowest, purcell_delta(-lim + 2 * lim * i / 99, -lim + 2 * lim * j / 99));
  EXPECT_GT(lowest, 0.0);
}

TEST(PurcellVelocity, MatchesLiteralTranscription) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const PurcellState s{M_PI * rng.symmetric(), M_PI * rng.symmetric(), M_PI * rng.symmetric(), 0, 0};
    const RateVector r{rng.symmetric(), rng.symmetric()};
    const auto a = purcell_velocity(s, r);
    const auto b = support::reference_velocity(s, r);
    EXPECT_NEAR(a.u, b.u, 1e-13);
    EXPECT_NEAR(a.v, b.v, 1e-13);
    EXPECT_NEAR(a.ddc, b.ddc, 1e-13);
  }
}

TEST(PurcellVelocity, ZeroRatesGiveZero) {
  const auto v = purcell_velocity({0.3, -0.2, 1.0, 0, 0}, {0, 0});
  EXPECT_EQ(v.u, 0.0);
  EXPECT_EQ(v.v, 0.0);
  EXPECT_EQ(v.ddc, 0.0);
}

TEST(PurcellVelocity, StraightEqualRatesDoNotRotate) {
  EXPECT_NEAR(purcell_velocity({0, 0, 0, 0, 0}, {1, 1}).ddc, 0.0, 1e-15);
}

TEST(PurcellVelocity, LinearInRates) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const PurcellState s{kDmax * rng.symmetric(), kDmax * rng.symmetric(), M_PI * rng.symmetric(), 0, 0};
    const RateVector r1{rng.symmetric(), rng.symmetric()}, r2{rng.symmetric(), rng.symmetric()};
    const double x = 3 * rng.symmetric(), y = 3 * rng.symmetric();
    const auto lhs = purcell_velocity(s, {x * r1.dd1 + y * r2.dd1, x * r1.dd2 + y * r2.dd2});
    const auto rhs = sum(purcell_velocity(s, r1), purcell_velocity(s, r2), x, y);
    EXPECT_NEAR(lhs.u, rhs.u, 1e-14);
    EXPECT_NEAR(lhs.v, rhs.v, 1e-14);
    EXPECT_NEAR(lhs.ddc, rhs.ddc, 1e-14);
  }
}

TEST(PurcellVelocity, FrameEquivariance) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    PurcellState s{kDmax * rng.symmetric(), kDmax * rng.symmetric(), M_PI * rng.symmetric(), 0, 0};
    const RateVector r{rng.symmetric(), rng.symmetric()};
    const double phi = M_PI * rng.symmetric();
    const auto a = purcell_velocity(s, r);
    s.dc += phi;
    const auto b = purcell_velocity(s, r);
    EXPECT_NEAR(b.u, std::cos(phi) * a.u - std::sin(phi) * a.v, 1e-14);
    EXPECT_NEAR(b.v, std::sin(phi) * a.u + std::cos(phi) * a.v, 1e-14);
    EXPECT_NEAR(b.ddc, a.ddc, 1e-14);
  }
}

TEST(PurcellVelocity, RateReversalNegates) {
  const PurcellState s{0.4, -0.1, 0.7, 0, 0};
  const auto a = purcell_velocity(s, {0.3, -0.8});
  const auto b = purcell_velocity(s, {-0.3, 0.8});
  EXPECT_DOUBLE_EQ(a.u, -b.u);
  EXPECT_DOUBLE_EQ(a.v, -b.v);
  EXPECT_DOUBLE_EQ(a.ddc, -b.ddc);
}

TEST(NgVelocity, Examples) {
  EXPECT_EQ(ng_velocity(2, 2, {0, 0}), 0.0);
  EXPECT_EQ(ng_velocity(2, 2, {1, 0}), 0.125);
  for (double d : {0.5, 3.0, 9.5})
    for (double w : {-2.0, 0.7}) EXPECT_NEAR(ng_velocity(d, d, {w, w}), 0.0, 1e-16);
  EXPECT_THROW(ng_velocity(0, 2, {1, 0}), std::domain_error);
  EXPECT_THROW(ng_velocity(2, -1, {1, 0}), std::domain_error);
}

TEST(ValidActions, Boundaries) {
  const auto p = ModelParams::purcell_defaults();
  const auto acts = valid_actions(PurcellState{kDmax, -kDmax, 0, 0, 0}, p, false);
  ASSERT_EQ(acts.size(), 2u);
  EXPECT_EQ(acts[0], (Action{1, -1}));
  EXPECT_EQ(acts[1], (Action{2, +1}));
  const auto ng = valid_actions(NGState{8, 8, 0}, ModelParams::ng_defaults(), true);
  ASSERT_EQ(ng.size(), 3u);
  EXPECT_EQ(ng[0], (Action{1, +1}));
  EXPECT_EQ(ng[1], (Action{2, +1}));
  EXPECT_TRUE(ng[2].is_null());
  for (int id = 0; id < 4; ++id) {
    EXPECT_EQ(valid_actions(Corner::from_id(id), false).size(), 2u);
    EXPECT_EQ(valid_actions(Corner::from_id(id), true).size(), 3u);
  }
}

TEST(IntegrateStep, NullIsIdentity) {
  const auto p = ModelParams::ng_defaults();
  const SwimmerState s = NGState{8, 10, 1.5};
  const auto r = integrate_step(s, Action::null(), p);
  EXPECT_EQ(std::get<NGState>(r.state), std::get<NGState>(s));
  EXPECT_EQ(r.dx, 0.0);
}

TEST(IntegrateStep, IllegalActionThrows) {
  EXPECT_THROW(integrate_step(NGState{8, 8, 0}, {1, -1}, ModelParams::ng_defaults()), InvalidActionError);
  EXPECT_THROW(integrate_step(NGState{8.5, 8, 0}, {1, 1}, ModelParams::ng_defaults()), InvalidActionError);
}

TEST(IntegrateStep, EndpointsSnapExactly) {
  const auto p = ModelParams::purcell_defaults();
  SwimmerState s = corner_state(Model::purcell, p, Corner::from_id(0));
  for (const Action a : {Action{2, 1}, Action{1, 1}, Action{2, -1}, Action{1, -1}}) {
    s = integrate_step(s, a, p).state;
    ASSERT_TRUE(corner_of(s, p).has_value());
  }
  EXPECT_EQ(std::get<PurcellState>(s).d1, -p.d_max);
  EXPECT_EQ(std::get<PurcellState>(s).d2, -p.d_max);
}

TEST(IntegrateStep, PurcellReciprocalFlipReturns) {
  const auto p = ModelParams::purcell_defaults();
  SwimmerState s = corner_state(Model::purcell, p, Corner::from_id(0));
  s = integrate_step(s, {1, 1}, p).state;
  s = integrate_step(s, {1, -1}, p).state;
  const auto& q = std::get<PurcellState>(s);
  EXPECT_LE(std::abs(q.x), 1e-8);
  EXPECT_LE(std::abs(q.y), 1e-8);
  EXPECT_LE(std::abs(q.dc), 1e-8);
}

// Moving one link at fixed other length integrates in closed form:
// dx = (1/6) [ -ln((hi + d2)/(lo + d2)) + 2 (hi - lo)/d2 ] for raising d1.
TEST(IntegrateStep, NgLegMatchesLogFormula) {
  const auto p = ModelParams::ng_defaults();
  const double lo = p.d_min, hi = p.d_max;
  for (double d2 : {lo, hi}) {
    const auto r = integrate_step(NGState{lo, d2, 0}, {1, 1}, p);
    const double expected = (-std::log((hi + d2) / (lo + d2)) + 2 * (hi - lo) / d2) / 6;
    EXPECT_NEAR(r.dx, expected, 1e-14);
  }
  for (double d1 : {lo, hi}) {
    const auto r = integrate_step(NGState{d1, lo, 0}, {2, 1}, p);
    const double expected = (std::log((hi + d1) / (lo + d1)) - 2 * (hi - lo) / d1) / 6;
    EXPECT_NEAR(r.dx, expected, 1e-14);
  }
}

TEST(IntegrateStep, NgSignatureGolden) {
  const auto p = ModelParams::ng_defaults();
  SwimmerState s = corner_state(Model::ng, p, Corner::from_id(0));
  double x = 0;
  for (const Action a : {Action{1, 1}, Action{2, 1}, Action{1, -1}, Action{2, -1}}) {
    const auto r = integrate_step(s, a, p);
    x += r.dx;
    s = r.state;
  }
  EXPECT_NEAR(x, (0.1 + std::log(80.0 / 81.0)) / 3, 1e-14);
  EXPECT_NEAR(position_x(s), x, 1e-15);
}

TEST(IntegrateStep, PurcellSignatureGolden) {
  const auto p = ModelParams::purcell_defaults();
  SwimmerState s = corner_state(Model::purcell, p, Corner::from_id(0));
  for (const Action a : {Action{2, 1}, Action{1, 1}, Action{2, -1}, Action{1, -1}}) s = integrate_step(s, a, p).state;
  const auto& q = std::get<PurcellState>(s);
  EXPECT_NEAR(q.x, 0.062494198594993, 1e-12);
  EXPECT_NEAR(q.y, 0.0, 1e-12);
  EXPECT_NEAR(q.dc, 0.0, 1e-12);
}

TEST(StepDuration, MatchesStrokeRange) {
  EXPECT_DOUBLE_EQ(step_duration(Model::purcell, ModelParams::purcell_defaults()), M_PI / 3);
  EXPECT_DOUBLE_EQ(step_duration(Model::ng, ModelParams::ng_defaults()), 2.0);
}
