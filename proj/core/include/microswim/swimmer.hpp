#pragma once

#include <stdexcept>
#include <vector>

#include "microswim/types.hpp"

namespace microswim {

// Rigid-body velocity of Purcell's middle link: centroid velocity (u, v) in the
// lab frame and its angular velocity ddc.
struct PurcellVelocity {
  double u = 0;
  double v = 0;
  double ddc = 0;
};

class SingularConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Common denominator of the closed-form Purcell velocities, with unit link
/// length and a drag anisotropy of exactly 2.
double purcell_delta(double d1, double d2);

/// Closed-form Purcell kinematics. Linear in the rates.
///
/// Geometry: link 1 hangs off the rear joint of the middle link with tangent
/// angle dc - d1, link 2 off the front joint with tangent angle dc + d2
/// (the sense recovered by `oracle::calibrate_convention`).
///
/// Throws SingularConfigurationError when |delta| < 1e-12.
PurcellVelocity purcell_velocity(const PurcellState& s, const RateVector& r);

/// Axial centroid velocity of the three-sphere swimmer (sphere radius 1).
/// Throws std::domain_error unless d1 > 0 and d2 > 0.
double ng_velocity(double d1, double d2, const RateVector& r);

/// Legal actions from a boundary state: one raise or lower per DOF, plus the
/// null action when `include_null`. Ordered by action id.
std::vector<Action> valid_actions(const SwimmerState& s, const ModelParams& p,
                                  bool include_null = true);
std::vector<Action> valid_actions(Corner c, bool include_null = true);

struct StepResult {
  SwimmerState state;
  double dx = 0;  // change of the centroid's x coordinate
};

/// Drives one DOF across its full range at unit rate and integrates the pose
/// with fixed-step RK4 (`p.substeps` substeps). DOF endpoints are snapped
/// exactly onto the extremes. The null action returns the state unchanged.
///
/// Throws InvalidActionError if `a` is not legal from `s`.
StepResult integrate_step(const SwimmerState& s, const Action& a, const ModelParams& p);

}  // namespace microswim
