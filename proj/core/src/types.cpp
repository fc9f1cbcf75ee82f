#include "microswim/types.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace microswim {

std::string_view to_string(Model m) { return m == Model::purcell ? "purcell" : "ng"; }

std::string_view to_string(Direction d) { return d == Direction::pos_x ? "+x" : "-x"; }

Model parse_model(std::string_view s) {
  if (s == "purcell") return Model::purcell;
  if (s == "ng") return Model::ng;
  throw ConfigError("unknown model '" + std::string(s) + "' (expected purcell or ng)");
}

Direction parse_direction(std::string_view s) {
  if (s == "+x" || s == "x" || s == "pos_x" || s == "pos") return Direction::pos_x;
  if (s == "-x" || s == "neg_x" || s == "neg") return Direction::neg_x;
  throw ConfigError("unknown direction '" + std::string(s) + "' (expected +x or -x)");
}

int action_id(const Action& a) {
  if (a.is_null()) return 4;
  if (a.dof == 1) return a.roc > 0 ? 0 : 1;
  return a.roc > 0 ? 2 : 3;
}

Action action_from_id(int id) {
  switch (id) {
    case 0: return {1, +1};
    case 1: return {1, -1};
    case 2: return {2, +1};
    case 3: return {2, -1};
    case 4: return Action::null();
    default: throw std::out_of_range("action id out of range");
  }
}

std::string format_action(const Action& a) {
  std::string out = "DOF " + std::to_string(a.dof) + " ROC ";
  out += a.roc > 0 ? "+1" : (a.roc < 0 ? "-1" : "0");
  return out;
}

int Corner::id() const {
  if (!d1_high) return d2_high ? 1 : 0;
  return d2_high ? 2 : 3;
}

Corner Corner::from_id(int id) {
  switch (id) {
    case 0: return {false, false};
    case 1: return {false, true};
    case 2: return {true, true};
    case 3: return {true, false};
    default: throw std::out_of_range("corner id out of range");
  }
}

bool is_legal(Corner c, const Action& a) {
  if (a.is_null()) return true;
  if (a.dof != 1 && a.dof != 2) return false;
  if (a.roc != 1 && a.roc != -1) return false;
  const bool high = a.dof == 1 ? c.d1_high : c.d2_high;
  return high ? a.roc < 0 : a.roc > 0;
}

Corner apply_action(Corner c, const Action& a) {
  if (!is_legal(c, a)) throw InvalidActionError("action " + format_action(a) + " leaves the stroke range");
  if (a.is_null()) return c;
  if (a.dof == 1) c.d1_high = !c.d1_high;
  else c.d2_high = !c.d2_high;
  return c;
}

Model model_of(const SwimmerState& s) {
  return std::holds_alternative<PurcellState>(s) ? Model::purcell : Model::ng;
}

double position_x(const SwimmerState& s) {
  return std::visit([](const auto& st) { return st.x; }, s);
}

ModelParams ModelParams::purcell_defaults() { return {std::numbers::pi / 6.0, 0.0, 200}; }

ModelParams ModelParams::ng_defaults() { return {10.0, 8.0, 200}; }

ModelParams ModelParams::defaults(Model m) {
  return m == Model::purcell ? purcell_defaults() : ng_defaults();
}

void validate(Model m, const ModelParams& p) {
  if (p.substeps <= 0) throw ConfigError("substeps must be positive");
  if (m == Model::purcell) {
    if (!(p.d_max > 0.0) || p.d_max > std::numbers::pi / 3.0 + 1e-15)
      throw ConfigError("purcell d_max must lie in (0, pi/3]");
  } else {
    if (!(p.d_min > 0.0) || !(p.d_min < p.d_max))
      throw ConfigError("ng bounds must satisfy 0 < d_min < d_max");
  }
}

double dof_low(Model m, const ModelParams& p) { return m == Model::purcell ? -p.d_max : p.d_min; }

double dof_high(Model /*m*/, const ModelParams& p) { return p.d_max; }

double step_duration(Model m, const ModelParams& p) {
  return dof_high(m, p) - dof_low(m, p);
}

SwimmerState corner_state(Model m, const ModelParams& p, Corner c) {
  const double lo = dof_low(m, p);
  const double hi = dof_high(m, p);
  const double d1 = c.d1_high ? hi : lo;
  const double d2 = c.d2_high ? hi : lo;
  if (m == Model::purcell) return PurcellState{d1, d2, 0.0, 0.0, 0.0};
  return NGState{d1, d2, 0.0};
}

std::optional<Corner> corner_of(const SwimmerState& s, const ModelParams& p) {
  const Model m = model_of(s);
  const double lo = dof_low(m, p);
  const double hi = dof_high(m, p);
  auto [d1, d2] = std::visit([](const auto& st) { return std::pair{st.d1, st.d2}; }, s);
  auto level = [&](double d) -> std::optional<bool> {
    if (d == lo) return false;
    if (d == hi) return true;
    return std::nullopt;
  };
  auto l1 = level(d1);
  auto l2 = level(d2);
  if (!l1 || !l2) return std::nullopt;
  return Corner{*l1, *l2};
}

}  // namespace microswim
