#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "microswim/environment.hpp"
#include "microswim/oracle.hpp"

namespace microswim::rl {

// Q-values over the four shape corners and the five action ids. Entries for
// actions that would leave the stroke range are never read or written.
class QTable {
 public:
  explicit QTable(bool include_null = true);

  double value(int corner, int action) const;
  void set(int corner, int action, double v);
  bool legal(int corner, int action) const;
  bool include_null() const { return include_null_; }

  // Highest Q among legal actions of `corner`.
  double max_value(int corner) const;
  // Legal action with the highest Q; ties go to the lowest action id.
  int greedy(int corner) const;

 private:
  bool include_null_;
  std::array<std::array<double, kNumActionIds>, 4> q_{};
};

struct QConfig {
  double alpha = 0.5;
  double gamma = 0.8;
  double epsilon = 0.3;
  double epsilon_decay = 0.95;
  std::uint64_t seed = 0;
  int max_steps = 200;
};

void validate(const QConfig& cfg);

/// Q(s,a) += alpha * (reward + gamma * max_a' Q(s',a') - Q(s,a)).
void q_update(QTable& q, int s, int a, double reward, int s_next, double alpha, double gamma);

/// Epsilon-greedy choice among legal actions of corner `s`.
Action select_action(const QTable& q, int s, double epsilon, Rng& rng);

struct TrainResult {
  QTable q;
  Transcript transcript;
  std::optional<int> acquisition_step;
};

/// Runs epsilon-greedy Q-learning with reward equal to the per-step displacement
/// toward the target (noisy displacement when zeta > 0).
///
/// acquisition_step is the first step n such that, at n and at every later
/// step, the greedy policy rolled out from the current corner for 8 steps
/// follows `signature` exactly.
TrainResult train(const EnvConfig& env_cfg, const QConfig& q_cfg,
                  const std::optional<oracle::GaitCycle>& signature = std::nullopt);

// True when the greedy rollout of `q` from `corner` follows `cycle` for `steps` steps.
bool greedy_locked(const QTable& q, int corner, const oracle::GaitCycle& cycle, int steps = 8);

}  // namespace microswim::rl
