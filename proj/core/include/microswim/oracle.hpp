#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "microswim/swimmer.hpp"
#include "microswim/types.hpp"

namespace microswim::oracle {

struct RFTConfig {
  int segments_per_link = 400;
  double xi_ratio = 2.0;  // perpendicular / parallel drag, slender limit
};

// Rotation sense of each joint: link 1 tangent angle is dc + s1*d1, link 2 is
// dc + s2*d2. Link 1 always hangs off the rear joint.
struct JointSense {
  int s1 = -1;
  int s2 = +1;
  friend bool operator==(const JointSense&, const JointSense&) = default;
};

// The sense under which the closed-form expressions reproduce the RFT solve.
inline constexpr JointSense kCalibratedSense{-1, +1};

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical resistive-force-theory solve for Purcell's swimmer.
///
/// Every link is cut into `segments_per_link` equal segments and the drag is
/// evaluated at segment midpoints with f = -[t t + xi_ratio (I - t t)] . rdot
/// (parallel drag normalised to 1). Total force and the torque about the middle
/// link centroid vanish; the resulting 3x3 system is solved for (u, v, ddc).
PurcellVelocity rft_solve(const PurcellState& s, const RateVector& r, const RFTConfig& cfg = {},
                          JointSense sense = kCalibratedSense);

// A closed sequence of actions starting from `start`.
struct GaitCycle {
  Model model = Model::ng;
  Corner start;
  std::vector<Action> actions;
  double dx_per_cycle = 0;
  double rotation_per_cycle = 0;  // Purcell only

  // Starts the same closed path at another point of the loop.
  GaitCycle rotated(std::size_t offset) const;
  // The time reversal: same shape path traversed backwards.
  GaitCycle reversed() const;
  // Rotation whose start corner is `c`; throws if the cycle never visits it.
  GaitCycle starting_at(Corner c) const;
  std::vector<Corner> corners() const;  // corner before each action
};

class NonClosingCycleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Net displacement of a three-sphere cycle by composite 8-point Gauss-Legendre
/// quadrature of `ng_velocity`, `resolution` panels per leg.
double ng_quadrature_cycle(const GaitCycle& cycle, const ModelParams& params, int resolution = 2000);

/// Lab-frame displacement of one traversal starting from the cycle's start
/// corner with zero pose, via `integrate_step`. Returns (dx, dy, ddc).
struct CycleMotion {
  double dx = 0;
  double dy = 0;
  double ddc = 0;
};
CycleMotion cycle_motion(const GaitCycle& cycle, const ModelParams& params);

/// Per-cycle displacement along the swimmer's mean axis. For the three-sphere
/// swimmer this is simply the net x displacement. For Purcell it is the net
/// translation projected on the mean middle-link orientation over the loop's
/// corners, which makes it independent of where the loop is entered.
double cycle_displacement(const GaitCycle& cycle, const ModelParams& params);

/// All primitive closed action cycles of length 1..max_len (max_len <= 8),
/// deduplicated by rotation, ranked by displacement per step toward `toward`.
std::vector<GaitCycle> enumerate_cycles(Model model, const ModelParams& params, int max_len,
                                        Direction toward = Direction::pos_x,
                                        bool include_null = true);

/// Best-ranked cycle of length <= 4 for the model and direction.
GaitCycle signature_cycle(Model model, const ModelParams& params, Direction toward);

using PurcellModelFn = std::function<PurcellVelocity(const PurcellState&, const RateVector&)>;

struct ProbeCase {
  PurcellState state;
  RateVector rates;
};

struct ConventionRow {
  JointSense sense;
  double max_rel_error = 0;
  std::vector<double> per_probe;  // relative error per probe
  bool matches = false;
};

struct ConventionReport {
  std::vector<ProbeCase> probes;
  std::vector<ConventionRow> rows;
  JointSense chosen;
  std::vector<bool> non_discriminating;  // per probe: every convention agrees
  double tolerance = 1e-3;
};

class NoMatchingConventionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The fixed probe set: 32 seeded random states/rates inside the default
/// Purcell stroke range, preceded by the straight swimmer at rest.
std::vector<ProbeCase> probe_set(double d_max);

/// Compares the closed form against the RFT solve under each of the four joint
/// senses and returns the unique sense with max relative error < 1e-3.
/// Throws NoMatchingConventionError when zero or several senses match.
ConventionReport calibrate_convention(const RFTConfig& cfg = {}, PurcellModelFn model = {},
                                      double d_max = ModelParams::purcell_defaults().d_max);

// ||a - b||_inf / ||b||_inf over the three velocity components (0 when both vanish).
double relative_difference(const PurcellVelocity& a, const PurcellVelocity& b);

}  // namespace microswim::oracle
