#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace microswim {

enum class Model { purcell, ng };

enum class Direction { pos_x, neg_x };

std::string_view to_string(Model m);
std::string_view to_string(Direction d);
Model parse_model(std::string_view s);
Direction parse_direction(std::string_view s);

inline double direction_sign(Direction d) { return d == Direction::pos_x ? 1.0 : -1.0; }
inline Direction opposite(Direction d) {
  return d == Direction::pos_x ? Direction::neg_x : Direction::pos_x;
}

// A discrete actuation: which DOF moves and in which sense. roc == 0 is the
// null action; its dof is irrelevant and compares equal for any index.
struct Action {
  int dof = 1;  // 1 or 2
  int roc = 0;  // -1, 0, +1

  bool is_null() const { return roc == 0; }
  static Action null() { return {1, 0}; }

  friend bool operator==(const Action& a, const Action& b) {
    if (a.is_null() || b.is_null()) return a.is_null() == b.is_null();
    return a.dof == b.dof && a.roc == b.roc;
  }
};

// Stable action ids used by tables and tie-breaking.
// 0: DOF1 +1, 1: DOF1 -1, 2: DOF2 +1, 3: DOF2 -1, 4: null.
inline constexpr int kNumActionIds = 5;
int action_id(const Action& a);
Action action_from_id(int id);

// Canonical text form, also the response grammar: "DOF 1 ROC +1".
std::string format_action(const Action& a);

// Corner of the shape square. Ids 0..3 run in Gray-code order over the
// (d1, d2) extremes: 0 = (lo, lo), 1 = (lo, hi), 2 = (hi, hi), 3 = (hi, lo).
struct Corner {
  bool d1_high = false;
  bool d2_high = false;

  int id() const;
  static Corner from_id(int id);
  friend bool operator==(const Corner&, const Corner&) = default;
};

// Shape after applying a move to a corner. Throws if the move leaves the square.
Corner apply_action(Corner c, const Action& a);
bool is_legal(Corner c, const Action& a);

struct PurcellState {
  double d1 = 0;  // relative joint angles
  double d2 = 0;
  double dc = 0;  // middle-link orientation, unwrapped
  double x = 0;   // middle-link centroid
  double y = 0;
  friend bool operator==(const PurcellState&, const PurcellState&) = default;
};

struct NGState {
  double d1 = 0;  // front link length
  double d2 = 0;  // rear link length
  double x = 0;   // axial centroid
  friend bool operator==(const NGState&, const NGState&) = default;
};

using SwimmerState = std::variant<PurcellState, NGState>;

Model model_of(const SwimmerState& s);
double position_x(const SwimmerState& s);

struct RateVector {
  double dd1 = 0;
  double dd2 = 0;
};

struct ModelParams {
  double d_max = 0;
  double d_min = 0;  // NG only
  int substeps = 200;

  static ModelParams purcell_defaults();
  static ModelParams ng_defaults();
  static ModelParams defaults(Model m);
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidActionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Validates amplitude bounds for the given model; throws ConfigError.
void validate(Model m, const ModelParams& p);

// Lower/upper DOF extremes for a model.
double dof_low(Model m, const ModelParams& p);
double dof_high(Model m, const ModelParams& p);

// Dimensionless duration of one action step.
double step_duration(Model m, const ModelParams& p);

// Boundary state for a corner with zero pose.
SwimmerState corner_state(Model m, const ModelParams& p, Corner c);

// Corner of a state whose DOFs sit exactly at their extremes; std::nullopt otherwise.
std::optional<Corner> corner_of(const SwimmerState& s, const ModelParams& p);

}  // namespace microswim
