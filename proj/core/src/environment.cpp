#include "microswim/environment.hpp"

#include <algorithm>
#include <cmath>

namespace microswim {

EnvConfig EnvConfig::defaults(Model m) {
  EnvConfig cfg;
  cfg.model = m;
  cfg.params = ModelParams::defaults(m);
  return cfg;
}

void validate(const EnvConfig& cfg) {
  validate(cfg.model, cfg.params);
  if (cfg.initial_state < 0 || cfg.initial_state > 3)
    throw ConfigError("initial_state must be a corner id in 0..3");
  if (!(cfg.zeta >= 0.0)) throw ConfigError("zeta must be >= 0");
  if (cfg.truncation_decimals < 0 || cfg.truncation_decimals > 9)
    throw ConfigError("truncation_decimals must lie in 0..9");
}

std::vector<Action> Transcript::actions() const {
  std::vector<Action> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.action);
  return out;
}

double truncate_decimals(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Values within rounding noise of a grid point land on it.
  const double scaled = x * scale;
  const double snapped = std::nearbyint(scaled);
  if (std::abs(scaled - snapped) <= 1e-9 * std::max(1.0, std::abs(scaled))) return snapped / scale;
  return std::trunc(scaled) / scale;
}

Environment::Environment(EnvConfig cfg)
    : cfg_(std::move(cfg)),
      state_(corner_state(cfg_.model, cfg_.params, Corner::from_id(cfg_.initial_state))),
      rng_(cfg_.seed) {
  transcript_.config = cfg_;
}

Corner Environment::corner() const { return *corner_of(state_, cfg_.params); }

std::vector<Action> Environment::valid_actions() const {
  return microswim::valid_actions(corner(), cfg_.allow_null);
}

const StepRecord& Environment::step(const Action& a) {
  if (a.is_null() && !cfg_.allow_null)
    throw InvalidActionError("null action is disabled for this environment");
  return record(a, integrate_step(state_, a, cfg_.params));
}

const StepRecord& Environment::hold() { return record(Action::null(), {state_, 0.0}); }

const StepRecord& Environment::record(const Action& a, const StepResult& r) {
  const double y = noise_override_ ? noise_override_() : rng_.symmetric();
  StepRecord rec;
  rec.n = static_cast<int>(transcript_.records.size()) + 1;
  rec.state_before = state_;
  rec.state_after = r.state;
  rec.action = a.is_null() ? Action::null() : a;
  rec.dx_clean = r.dx;
  rec.dx_noisy = cfg_.zeta == 0.0 ? r.dx : r.dx * (1.0 + cfg_.zeta * y);
  X_ += rec.dx_noisy;
  rec.X = X_;
  state_ = r.state;
  transcript_.records.push_back(rec);
  return transcript_.records.back();
}

double Environment::reported_displacement() const {
  return truncate_decimals(X_, cfg_.truncation_decimals);
}

Environment env_reset(const EnvConfig& cfg) {
  validate(cfg);
  return Environment(cfg);
}

Transcript replay_transcript(const Transcript& t) {
  Environment env = env_reset(t.config);
  for (const auto& r : t.records) {
    if (r.action.is_null() && !t.config.allow_null) env.hold();
    else env.step(r.action);
  }
  Transcript out = env.transcript();
  out.aborted = t.aborted;
  return out;
}

}  // namespace microswim
