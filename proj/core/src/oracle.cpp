#include "microswim/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "microswim/environment.hpp"

namespace microswim::oracle {

namespace {

using Vec2 = Eigen::Vector2d;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 perp(const Vec2& r) { return {-r.y(), r.x()}; }  // e_z x r

Vec2 tangent(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Accumulates the force/torque balance of one link. Column k of `system`
// receives the drag produced by unit value of unknown k (u, v, ddc); `rhs`
// receives the drag of the prescribed joint motion.
struct Balance {
  Eigen::Matrix3d system = Eigen::Matrix3d::Zero();
  Eigen::Vector3d prescribed = Eigen::Vector3d::Zero();

  void add_link(const Vec2& joint, const Vec2& t, double outward, double joint_rate,
                const RFTConfig& cfg) {
    const int n = cfg.segments_per_link;
    const double ds = 1.0 / n;
    const Eigen::Matrix2d tt = t * t.transpose();
    const Eigen::Matrix2d resistance = tt + cfg.xi_ratio * (Eigen::Matrix2d::Identity() - tt);
    for (int i = 0; i < n; ++i) {
      const double sigma = (i + 0.5) * ds;
      const Vec2 p = joint + outward * sigma * t;
      const std::array<Vec2, 3> unit{Vec2{1, 0}, Vec2{0, 1}, perp(p)};
      for (int k = 0; k < 3; ++k) {
        const Vec2 f = -resistance * unit[k] * ds;
        system(0, k) += f.x();
        system(1, k) += f.y();
        system(2, k) += cross(p, f);
      }
      if (joint_rate != 0.0) {
        const Vec2 f = -resistance * (joint_rate * perp(p - joint)) * ds;
        prescribed += Eigen::Vector3d{f.x(), f.y(), cross(p, f)};
      }
    }
  }
};

}  // namespace

PurcellVelocity rft_solve(const PurcellState& s, const RateVector& r, const RFTConfig& cfg,
                          JointSense sense) {
  if (cfg.segments_per_link <= 0) throw std::invalid_argument("segments_per_link must be positive");
  // Positions are taken relative to the middle-link centroid, so torques are about it.
  const Vec2 tc = tangent(s.dc);
  Balance b;
  b.add_link(-0.5 * tc, tc, 1.0, 0.0, cfg);
  b.add_link(-0.5 * tc, tangent(s.dc + sense.s1 * s.d1), -1.0, sense.s1 * r.dd1, cfg);
  b.add_link(0.5 * tc, tangent(s.dc + sense.s2 * s.d2), 1.0, sense.s2 * r.dd2, cfg);

  Eigen::FullPivLU<Eigen::Matrix3d> lu(b.system);
  if (!lu.isInvertible()) throw SingularSystemError("rft_solve: singular balance system");
  const Eigen::Vector3d x = lu.solve(-b.prescribed);
  return {x(0), x(1), x(2)};
}

double relative_difference(const PurcellVelocity& a, const PurcellVelocity& b) {
  const double diff =
      std::max({std::abs(a.u - b.u), std::abs(a.v - b.v), std::abs(a.ddc - b.ddc)});
  const double scale = std::max({std::abs(b.u), std::abs(b.v), std::abs(b.ddc)});
  if (diff == 0.0) return 0.0;
  return scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Cycles

std::vector<Corner> GaitCycle::corners() const {
  std::vector<Corner> out;
  Corner c = start;
  for (const auto& a : actions) {
    out.push_back(c);
    c = apply_action(c, a);
  }
  return out;
}

GaitCycle GaitCycle::rotated(std::size_t offset) const {
  GaitCycle out = *this;
  if (actions.empty()) return out;
  offset %= actions.size();
  out.start = corners()[offset];
  std::rotate(out.actions.begin(), out.actions.begin() + static_cast<long>(offset),
              out.actions.end());
  return out;
}

GaitCycle GaitCycle::reversed() const {
  GaitCycle out = *this;
  std::reverse(out.actions.begin(), out.actions.end());
  for (auto& a : out.actions) a.roc = -a.roc;
  out.dx_per_cycle = -dx_per_cycle;
  out.rotation_per_cycle = -rotation_per_cycle;
  return out;
}

GaitCycle GaitCycle::starting_at(Corner c) const {
  const auto cs = corners();
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (cs[i] == c) return rotated(i);
  throw std::invalid_argument("cycle does not visit the requested corner");
}

namespace {

void check_closed(const GaitCycle& cycle) {
  if (cycle.actions.empty()) throw NonClosingCycleError("cycle has no actions");
  Corner c = cycle.start;
  for (const auto& a : cycle.actions) {
    if (!is_legal(c, a)) throw NonClosingCycleError("cycle contains an illegal action");
    c = apply_action(c, a);
  }
  if (!(c == cycle.start)) throw NonClosingCycleError("cycle does not return to its start shape");
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes{
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights{
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace

double ng_quadrature_cycle(const GaitCycle& cycle, const ModelParams& params, int resolution) {
  check_closed(cycle);
  validate(Model::ng, params);
  if (resolution <= 0) throw std::invalid_argument("resolution must be positive");
  const double duration = params.d_max - params.d_min;
  double total = 0.0;
  Corner c = cycle.start;
  for (const auto& a : cycle.actions) {
    if (!a.is_null()) {
      const double d1 = c.d1_high ? params.d_max : params.d_min;
      const double d2 = c.d2_high ? params.d_max : params.d_min;
      const double sgn = a.roc;
      const RateVector r = a.dof == 1 ? RateVector{sgn, 0} : RateVector{0, sgn};
      const double h = duration / resolution;
      for (int i = 0; i < resolution; ++i) {
        const double mid = (i + 0.5) * h;
        for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
          const double t = mid + 0.5 * h * kGlNodes[q];
          const double v = a.dof == 1 ? ng_velocity(d1 + sgn * t, d2, r)
                                      : ng_velocity(d1, d2 + sgn * t, r);
          total += 0.5 * h * kGlWeights[q] * v;
        }
      }
    }
    c = apply_action(c, a);
  }
  return total;
}

namespace {

// Pose increment of one step expressed in the frame of the starting pose.
struct Increment {
  double dx = 0, dy = 0, ddc = 0;
};

// Steps from each corner with zero pose. Both models are equivariant under
// rigid motions, so a trajectory is the composition of these increments.
class StepTable {
 public:
  StepTable(Model m, const ModelParams& p) {
    for (int c = 0; c < 4; ++c) {
      const Corner corner = Corner::from_id(c);
      for (int id = 0; id < kNumActionIds; ++id) {
        const Action a = action_from_id(id);
        if (!is_legal(corner, a)) continue;
        const auto res = integrate_step(corner_state(m, p, corner), a, p);
        Increment inc;
        if (const auto* ps = std::get_if<PurcellState>(&res.state)) {
          inc = {ps->x, ps->y, ps->dc};
        } else {
          inc.dx = std::get<NGState>(res.state).x;
        }
        table_[c][id] = inc;
      }
    }
  }

  const Increment& at(Corner c, const Action& a) const { return table_[c.id()][action_id(a)]; }

 private:
  std::array<std::array<Increment, kNumActionIds>, 4> table_{};
};

struct Trace {
  CycleMotion motion;
  std::vector<double> corner_orientations;
};

Trace trace_cycle(const GaitCycle& cycle, const StepTable& table) {
  Trace out;
  double x = 0, y = 0, dc = 0;
  Corner c = cycle.start;
  for (const auto& a : cycle.actions) {
    out.corner_orientations.push_back(dc);
    const auto& inc = table.at(c, a);
    const double cs = std::cos(dc), sn = std::sin(dc);
    x += cs * inc.dx - sn * inc.dy;
    y += sn * inc.dx + cs * inc.dy;
    dc += inc.ddc;
    c = apply_action(c, a);
  }
  out.motion = {x, y, dc};
  return out;
}

double mean_axis_displacement(const Trace& t) {
  double mean = 0.0;
  for (double o : t.corner_orientations) mean += o;
  mean /= static_cast<double>(t.corner_orientations.size());
  return t.motion.dx * std::cos(mean) + t.motion.dy * std::sin(mean);
}

}  // namespace

CycleMotion cycle_motion(const GaitCycle& cycle, const ModelParams& params) {
  check_closed(cycle);
  return trace_cycle(cycle, StepTable(cycle.model, params)).motion;
}

double cycle_displacement(const GaitCycle& cycle, const ModelParams& params) {
  check_closed(cycle);
  return mean_axis_displacement(trace_cycle(cycle, StepTable(cycle.model, params)));
}

namespace {

bool is_primitive(const std::vector<int>& ids) {
  const std::size_t n = ids.size();
  for (std::size_t period = 1; period < n; ++period) {
    if (n % period != 0) continue;
    bool repeats = true;
    for (std::size_t i = period; i < n && repeats; ++i) repeats = ids[i] == ids[i - period];
    if (repeats) return false;
  }
  return true;
}

}  // namespace

std::vector<GaitCycle> enumerate_cycles(Model model, const ModelParams& params, int max_len,
                                        Direction toward, bool include_null) {
  if (max_len > 8) throw std::invalid_argument("enumerate_cycles: max_len must be <= 8");
  validate(model, params);
  const StepTable table(model, params);

  // Canonical key: rotation with the smallest (start corner, action ids).
  using Key = std::pair<int, std::vector<int>>;
  std::map<Key, GaitCycle> unique;

  std::vector<Action> path;
  auto visit = [&](auto&& self, Corner start, Corner at) -> void {
    if (!path.empty() && at == start) {
      GaitCycle cyc{model, start, path, 0, 0};
      std::vector<int> ids;
      for (const auto& a : path) ids.push_back(action_id(a));
      if (is_primitive(ids)) {
        Key best{start.id(), ids};
        for (std::size_t k = 1; k < path.size(); ++k) {
          const auto rot = cyc.rotated(k);
          std::vector<int> rid;
          for (const auto& a : rot.actions) rid.push_back(action_id(a));
          best = std::min(best, Key{rot.start.id(), rid});
        }
        if (!unique.contains(best)) {
          GaitCycle rep{model, Corner::from_id(best.first), {}, 0, 0};
          for (int id : best.second) rep.actions.push_back(action_from_id(id));
          const auto trace = trace_cycle(rep, table);
          rep.dx_per_cycle = mean_axis_displacement(trace);
          rep.rotation_per_cycle = trace.motion.ddc;
          unique.emplace(best, std::move(rep));
        }
      }
    }
    if (static_cast<int>(path.size()) == max_len) return;
    for (const auto& a : valid_actions(at, include_null)) {
      path.push_back(a);
      self(self, start, apply_action(at, a));
      path.pop_back();
    }
  };
  for (int c = 0; c < 4; ++c) visit(visit, Corner::from_id(c), Corner::from_id(c));

  std::vector<GaitCycle> out;
  out.reserve(unique.size());
  for (auto& [key, cyc] : unique) out.push_back(std::move(cyc));
  const double sign = direction_sign(toward);
  std::stable_sort(out.begin(), out.end(), [sign](const GaitCycle& a, const GaitCycle& b) {
    const double ra = sign * a.dx_per_cycle / static_cast<double>(a.actions.size());
    const double rb = sign * b.dx_per_cycle / static_cast<double>(b.actions.size());
    if (ra != rb) return ra > rb;
    return a.actions.size() < b.actions.size();
  });
  return out;
}

GaitCycle signature_cycle(Model model, const ModelParams& params, Direction toward) {
  auto cycles = enumerate_cycles(model, params, 4, toward, false);
  return cycles.front();
}

// ---------------------------------------------------------------------------
// Convention calibration

std::vector<ProbeCase> probe_set(double d_max) {
  std::vector<ProbeCase> probes;
  probes.push_back({PurcellState{0, 0, 0, 0, 0}, RateVector{0, 0}});
  Rng rng(20240117);
  for (int i = 0; i < 32; ++i) {
    ProbeCase pc;
    pc.state.d1 = d_max * rng.symmetric();
    pc.state.d2 = d_max * rng.symmetric();
    pc.state.dc = std::numbers::pi * rng.symmetric();
    pc.rates.dd1 = rng.symmetric();
    pc.rates.dd2 = rng.symmetric();
    probes.push_back(pc);
  }
  return probes;
}

ConventionReport calibrate_convention(const RFTConfig& cfg, PurcellModelFn model, double d_max) {
  if (!model) model = purcell_velocity;
  ConventionReport report;
  report.probes = probe_set(d_max);
  const std::array<JointSense, 4> senses{JointSense{+1, +1}, JointSense{+1, -1},
                                         JointSense{-1, +1}, JointSense{-1, -1}};
  for (const auto& sense : senses) {
    ConventionRow row;
    row.sense = sense;
    for (const auto& probe : report.probes) {
      const double err =
          relative_difference(model(probe.state, probe.rates), rft_solve(probe.state, probe.rates, cfg, sense));
      row.per_probe.push_back(err);
      row.max_rel_error = std::max(row.max_rel_error, err);
    }
    row.matches = row.max_rel_error < report.tolerance;
    report.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < report.probes.size(); ++i) {
    bool all = true;
    for (const auto& row : report.rows) all = all && row.per_probe[i] < report.tolerance;
    report.non_discriminating.push_back(all);
  }
  const auto matches = std::count_if(report.rows.begin(), report.rows.end(),
                                     [](const ConventionRow& r) { return r.matches; });
  if (matches != 1)
    throw NoMatchingConventionError("calibrate_convention: " + std::to_string(matches) +
                                    " joint conventions match the closed form");
  report.chosen = std::find_if(report.rows.begin(), report.rows.end(),
                               [](const ConventionRow& r) { return r.matches; })
                      ->sense;
  return report;
}

}  // namespace microswim::oracle
