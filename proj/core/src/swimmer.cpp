#include "microswim/swimmer.hpp"

#include <array>
#include <cmath>
#include <complex>

namespace microswim {

namespace {

// One printed term: coef * f(dc + k1*d1 + k2*d2) for the translational sums,
// coef * cos(k1*d1 + k2*d2) for the rotational sums and the denominator.
struct Term {
  int coef;
  int k1;
  int k2;
};

constexpr Term kTransDd1[] = {
    {262, -1, 0}, {-26, 1, 0},  {-2, 2, 0},   {18, -2, 0},   {-16, 0, -1},
    {78, -1, -1}, {-18, 1, -1}, {8, -2, -1},  {104, 0, 1},   {126, -1, 1},
    {30, 1, 1},   {24, 0, 2},   {21, -1, 2},  {1, 1, 2},     {-2, 2, 2},
    {-4, 0, -2},  {9, -1, -2},  {-3, 1, -2},  {2, -2, -2},   {36, 0, 0},
};

constexpr Term kTransDd2[] = {
    {104, -1, 0}, {-16, 1, 0},  {-4, 2, 0},  {24, -2, 0}, {-26, 0, -1},
    {30, -1, -1}, {-18, 1, -1}, {-3, 2, -1}, {1, -2, -1}, {262, 0, 1},
    {126, -1, 1}, {78, 1, 1},   {9, 2, 1},   {21, -2, 1}, {18, 0, 2},
    {8, 1, 2},    {2, 2, 2},    {-2, 0, -2}, {-2, -2, -2}, {36, 0, 0},
};

constexpr Term kRotDd1[] = {
    {102, 1, 0}, {2, 2, 0}, {-6, 1, -1}, {-4, 0, 2}, {42, 1, 1},
    {2, 2, 2},   {9, 1, 2}, {-3, 1, -2}, {108, 0, 0},
};

constexpr Term kRotDd2[] = {
    {4, 2, 0},  {6, 1, -1}, {3, 2, -1}, {-102, 0, 1}, {-2, 0, 2},
    {-42, 1, 1}, {-2, 2, 2}, {-9, 2, 1}, {-108, 0, 0},
};

// Bracket of the denominator; the full value is 3 times this sum.
constexpr Term kDelta[] = {
    {136, 1, 0}, {14, 2, 0}, {-8, 1, -1}, {-1, 2, -2}, {-4, 2, -1}, {14, 0, 2}, {56, 1, 1},
    {136, 0, 1}, {3, 2, 2},  {12, 2, 1},  {12, 1, 2},  {-4, 1, -2}, {282, 0, 0},
};

using cplx = std::complex<double>;

// e^{i k d} for k = -2..2, indexed by k + 2.
std::array<cplx, 5> phase_powers(double d) {
  const cplx z = std::polar(1.0, d);
  const cplx z2 = z * z;
  return {std::conj(z2), std::conj(z), cplx(1.0, 0.0), z, z2};
}

template <std::size_t N>
cplx phase_sum(const Term (&terms)[N], const std::array<cplx, 5>& p1,
               const std::array<cplx, 5>& p2) {
  cplx acc{0.0, 0.0};
  for (const auto& t : terms) acc += static_cast<double>(t.coef) * p1[t.k1 + 2] * p2[t.k2 + 2];
  return acc;
}

}  // namespace

double purcell_delta(double d1, double d2) {
  return 3.0 * phase_sum(kDelta, phase_powers(d1), phase_powers(d2)).real();
}

PurcellVelocity purcell_velocity(const PurcellState& s, const RateVector& r) {
  const auto p1 = phase_powers(s.d1);
  const auto p2 = phase_powers(s.d2);
  const double delta = 3.0 * phase_sum(kDelta, p1, p2).real();
  if (std::abs(delta) < 1e-12) throw SingularConfigurationError("purcell: singular configuration");

  // sum coef * sin(dc + phi) = Im(e^{i dc} sum coef e^{i phi}); likewise Re for cos.
  const cplx body = std::polar(1.0, s.dc);
  cplx trans{0.0, 0.0};
  double rot = 0.0;
  if (r.dd1 != 0.0) {
    trans += r.dd1 * phase_sum(kTransDd1, p1, p2);
    rot += r.dd1 * phase_sum(kRotDd1, p1, p2).real();
  }
  if (r.dd2 != 0.0) {
    trans += r.dd2 * phase_sum(kTransDd2, p1, p2);
    rot += r.dd2 * phase_sum(kRotDd2, p1, p2).real();
  }
  const cplx lab = body * trans;
  return {lab.imag() / (2.0 * delta), -lab.real() / (2.0 * delta), 2.0 * rot / delta};
}

double ng_velocity(double d1, double d2, const RateVector& r) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::domain_error("ng: link lengths must be positive");
  return ((r.dd2 - r.dd1) / (d1 + d2) + 2.0 * (r.dd1 / d2 - r.dd2 / d1)) / 6.0;
}

std::vector<Action> valid_actions(Corner c, bool include_null) {
  std::vector<Action> out;
  for (int id = 0; id < kNumActionIds; ++id) {
    const Action a = action_from_id(id);
    if (a.is_null() && !include_null) continue;
    if (is_legal(c, a)) out.push_back(a);
  }
  return out;
}

std::vector<Action> valid_actions(const SwimmerState& s, const ModelParams& p, bool include_null) {
  auto c = corner_of(s, p);
  if (!c) throw std::domain_error("valid_actions: state is not at an action boundary");
  return valid_actions(*c, include_null);
}

namespace {

StepResult step_purcell(const PurcellState& s0, const Action& a, const ModelParams& p) {
  const double duration = step_duration(Model::purcell, p);
  const int n = p.substeps;
  const double h = duration / n;
  const double sgn = a.roc;

  // Pose (dc, x, y) evolves under the prescribed shape path d(t) = d0 + sgn t.
  auto rhs = [&](double t, const std::array<double, 3>& z) {
    PurcellState st{s0.d1, s0.d2, z[0], 0, 0};
    RateVector r;
    if (a.dof == 1) {
      st.d1 += sgn * t;
      r.dd1 = sgn;
    } else {
      st.d2 += sgn * t;
      r.dd2 = sgn;
    }
    const auto vel = purcell_velocity(st, r);
    return std::array<double, 3>{vel.ddc, vel.u, vel.v};
  };

  std::array<double, 3> z{s0.dc, s0.x, s0.y};
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    const auto k1 = rhs(t, z);
    std::array<double, 3> tmp;
    for (int j = 0; j < 3; ++j) tmp[j] = z[j] + 0.5 * h * k1[j];
    const auto k2 = rhs(t + 0.5 * h, tmp);
    for (int j = 0; j < 3; ++j) tmp[j] = z[j] + 0.5 * h * k2[j];
    const auto k3 = rhs(t + 0.5 * h, tmp);
    for (int j = 0; j < 3; ++j) tmp[j] = z[j] + h * k3[j];
    const auto k4 = rhs(t + h, tmp);
    for (int j = 0; j < 3; ++j) z[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }

  PurcellState s1 = s0;
  s1.dc = z[0];
  s1.x = z[1];
  s1.y = z[2];
  const double target = a.roc > 0 ? p.d_max : -p.d_max;
  (a.dof == 1 ? s1.d1 : s1.d2) = target;
  return {s1, s1.x - s0.x};
}

StepResult step_ng(const NGState& s0, const Action& a, const ModelParams& p) {
  const double duration = step_duration(Model::ng, p);
  const int n = p.substeps;
  const double h = duration / n;
  const double sgn = a.roc;
  const RateVector r = a.dof == 1 ? RateVector{sgn, 0} : RateVector{0, sgn};

  auto rhs = [&](double t) {
    return a.dof == 1 ? ng_velocity(s0.d1 + sgn * t, s0.d2, r)
                      : ng_velocity(s0.d1, s0.d2 + sgn * t, r);
  };

  // The velocity depends on time only, so each RK4 stage collapses to Simpson.
  double dx = 0;
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    const double mid = rhs(t + 0.5 * h);
    dx += h / 6.0 * (rhs(t) + 4 * mid + rhs(t + h));
  }

  NGState s1 = s0;
  s1.x += dx;
  const double target = a.roc > 0 ? p.d_max : p.d_min;
  (a.dof == 1 ? s1.d1 : s1.d2) = target;
  return {s1, s1.x - s0.x};
}

}  // namespace

StepResult integrate_step(const SwimmerState& s, const Action& a, const ModelParams& p) {
  const auto corner = corner_of(s, p);
  if (!corner) throw InvalidActionError("integrate_step: state is not at an action boundary");
  if (!is_legal(*corner, a))
    throw InvalidActionError("integrate_step: illegal action " + format_action(a));
  if (a.is_null()) return {s, 0.0};
  if (const auto* ps = std::get_if<PurcellState>(&s)) return step_purcell(*ps, a, p);
  return step_ng(std::get<NGState>(s), a, p);
}

}  // namespace microswim
