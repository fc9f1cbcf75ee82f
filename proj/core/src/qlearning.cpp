#include "microswim/qlearning.hpp"

#include <cmath>
#include <limits>

namespace microswim::rl {

QTable::QTable(bool include_null) : include_null_(include_null) {}

bool QTable::legal(int corner, int action) const {
  const Action a = action_from_id(action);
  if (a.is_null() && !include_null_) return false;
  return is_legal(Corner::from_id(corner), a);
}

double QTable::value(int corner, int action) const {
  if (!legal(corner, action)) throw std::out_of_range("QTable: illegal (state, action) pair");
  return q_[corner][action];
}

void QTable::set(int corner, int action, double v) {
  if (!legal(corner, action)) throw std::out_of_range("QTable: illegal (state, action) pair");
  if (!std::isfinite(v)) throw std::invalid_argument("QTable: non-finite value");
  q_[corner][action] = v;
}

double QTable::max_value(int corner) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < kNumActionIds; ++a)
    if (legal(corner, a)) best = std::max(best, q_[corner][a]);
  return best;
}

int QTable::greedy(int corner) const {
  int best = -1;
  for (int a = 0; a < kNumActionIds; ++a) {
    if (!legal(corner, a)) continue;
    if (best < 0 || q_[corner][a] > q_[corner][best]) best = a;
  }
  return best;
}

void validate(const QConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(cfg.epsilon_decay > 0.0 && cfg.epsilon_decay <= 1.0))
    throw ConfigError("epsilon_decay must lie in (0, 1]");
  if (cfg.max_steps < 0) throw ConfigError("max_steps must be >= 0");
}

void q_update(QTable& q, int s, int a, double reward, int s_next, double alpha, double gamma) {
  const double old = q.value(s, a);
  const double target = reward + gamma * q.max_value(s_next);
  q.set(s, a, old + alpha * (target - old));
}

Action select_action(const QTable& q, int s, double epsilon, Rng& rng) {
  // One uniform draw decides exploration; a second picks the exploratory move.
  if (epsilon > 0.0 && rng.uniform01() < epsilon) {
    std::vector<int> legal;
    for (int a = 0; a < kNumActionIds; ++a)
      if (q.legal(s, a)) legal.push_back(a);
    return action_from_id(legal[rng.index(legal.size())]);
  }
  return action_from_id(q.greedy(s));
}

bool greedy_locked(const QTable& q, int corner, const oracle::GaitCycle& cycle, int steps) {
  const auto corners = cycle.corners();
  std::size_t pos = corners.size();
  for (std::size_t i = 0; i < corners.size(); ++i)
    if (corners[i].id() == corner) pos = i;
  if (pos == corners.size()) return false;
  Corner c = Corner::from_id(corner);
  for (int k = 0; k < steps; ++k) {
    const Action a = action_from_id(q.greedy(c.id()));
    if (!(a == cycle.actions[pos])) return false;
    c = apply_action(c, a);
    pos = (pos + 1) % cycle.actions.size();
  }
  return true;
}

TrainResult train(const EnvConfig& env_cfg, const QConfig& q_cfg,
                  const std::optional<oracle::GaitCycle>& signature) {
  validate(q_cfg);
  Environment env = env_reset(env_cfg);
  const oracle::GaitCycle sig =
      signature ? *signature : oracle::signature_cycle(env_cfg.model, env_cfg.params, env_cfg.target);
  const double sign = direction_sign(env_cfg.target);

  TrainResult out{QTable(env_cfg.allow_null), {}, std::nullopt};
  Rng rng(q_cfg.seed);
  double eps = q_cfg.epsilon;
  std::optional<int> locked_since;
  for (int n = 1; n <= q_cfg.max_steps; ++n) {
    const int s = env.corner().id();
    const Action a = select_action(out.q, s, eps, rng);
    const auto& rec = env.step(a);
    const double reward = sign * (env_cfg.zeta > 0.0 ? rec.dx_noisy : rec.dx_clean);
    const int s_next = env.corner().id();
    q_update(out.q, s, action_id(a), reward, s_next, q_cfg.alpha, q_cfg.gamma);
    eps *= q_cfg.epsilon_decay;

    if (greedy_locked(out.q, s_next, sig)) {
      if (!locked_since) locked_since = n;
    } else {
      locked_since.reset();
    }
  }
  out.acquisition_step = locked_since;
  out.transcript = env.transcript();
  return out;
}

}  // namespace microswim::rl
