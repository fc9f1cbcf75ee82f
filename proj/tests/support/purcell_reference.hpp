#pragma once

// Literal, term-by-term transcription of the closed-form Purcell velocities,
// kept independent of the table-driven production evaluator.

#include <cmath>

#include "microswim/swimmer.hpp"

namespace microswim::support {

// Rate coefficient of d1 in the u / v expressions, evaluated with trig
// function `f` (sin for u, cos for v).
template <class F>
double coeff_dd1(F f, double d1, double d2, double dc) {
  return 262 * f(dc - d1) - 26 * f(d1 + dc) - 2 * f(2 * d1 + dc) + 18 * f(dc - 2 * d1) -
         16 * f(dc - d2) + 78 * f(-d1 - d2 + dc) - 18 * f(d1 - d2 + dc) +
         8 * f(-2 * d1 - d2 + dc) + 104 * f(d2 + dc) + 126 * f(-d1 + d2 + dc) +
         30 * f(d1 + d2 + dc) + 24 * f(2 * d2 + dc) + 21 * f(-d1 + 2 * d2 + dc) +
         f(d1 + 2 * d2 + dc) - 2 * f(2 * d1 + 2 * d2 + dc) - 4 * f(dc - 2 * d2) +
         9 * f(-d1 - 2 * d2 + dc) - 3 * f(d1 - 2 * d2 + dc) + 2 * f(-2 * d1 - 2 * d2 + dc) +
         36 * f(dc);
}

template <class F>
double coeff_dd2(F f, double d1, double d2, double dc) {
  return 104 * f(dc - d1) - 16 * f(d1 + dc) - 4 * f(2 * d1 + dc) + 24 * f(dc - 2 * d1) -
         26 * f(dc - d2) + 30 * f(-d1 - d2 + dc) - 18 * f(d1 - d2 + dc) -
         3 * f(2 * d1 - d2 + dc) + f(-2 * d1 - d2 + dc) + 262 * f(d2 + dc) +
         126 * f(-d1 + d2 + dc) + 78 * f(d1 + d2 + dc) + 9 * f(2 * d1 + d2 + dc) +
         21 * f(-2 * d1 + d2 + dc) + 18 * f(2 * d2 + dc) + 8 * f(d1 + 2 * d2 + dc) +
         2 * f(2 * d1 + 2 * d2 + dc) - 2 * f(dc - 2 * d2) - 2 * f(-2 * d1 - 2 * d2 + dc) +
         36 * f(dc);
}

inline double rot_coeff_dd1(double d1, double d2) {
  using std::cos;
  return 102 * cos(d1) + 2 * cos(2 * d1) - 6 * cos(d1 - d2) - 4 * cos(2 * d2) +
         42 * cos(d1 + d2) + 2 * cos(2 * (d1 + d2)) + 9 * cos(d1 + 2 * d2) -
         3 * cos(d1 - 2 * d2) + 108;
}

inline double rot_coeff_dd2(double d1, double d2) {
  using std::cos;
  return 4 * cos(2 * d1) + 6 * cos(d1 - d2) + 3 * cos(2 * d1 - d2) - 102 * cos(d2) -
         2 * cos(2 * d2) - 42 * cos(d1 + d2) - 2 * cos(2 * (d1 + d2)) -
         9 * cos(2 * d1 + d2) - 108;
}

inline const auto kSin = [](double a) { return std::sin(a); };
inline const auto kCos = [](double a) { return std::cos(a); };


inline double reference_delta(double d1, double d2) {
  using std::cos;
  return 3 * (136 * cos(d1) + 14 * cos(2 * d1) - 8 * cos(d1 - d2) - cos(2 * (d1 - d2)) -
              4 * cos(2 * d1 - d2) + 14 * cos(2 * d2) + 56 * cos(d1 + d2) + 136 * cos(d2) +
              3 * cos(2 * (d1 + d2)) + 12 * cos(2 * d1 + d2) + 12 * cos(d1 + 2 * d2) -
              4 * cos(d1 - 2 * d2) + 282);
}

inline PurcellVelocity reference_velocity(const PurcellState& s, const RateVector& r) {
  const double delta = reference_delta(s.d1, s.d2);
  PurcellVelocity out;
  out.u = (r.dd1 * coeff_dd1(kSin, s.d1, s.d2, s.dc) + r.dd2 * coeff_dd2(kSin, s.d1, s.d2, s.dc)) / (2 * delta);
  out.v = -(r.dd1 * coeff_dd1(kCos, s.d1, s.d2, s.dc) + r.dd2 * coeff_dd2(kCos, s.d1, s.d2, s.dc)) / (2 * delta);
  out.ddc = 2 / delta * (r.dd1 * rot_coeff_dd1(s.d1, s.d2) + r.dd2 * rot_coeff_dd2(s.d1, s.d2));
  return out;
}

}  // namespace microswim::support
