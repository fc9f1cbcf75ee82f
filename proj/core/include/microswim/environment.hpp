#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "microswim/swimmer.hpp"
#include "microswim/types.hpp"

namespace microswim {

// Portable 64-bit generator. std::mt19937_64's output sequence is fixed by the
// standard; the real-valued draws below are computed by hand so that noise
// streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform on [-1, 1).
  double symmetric() { return 2.0 * uniform01() - 1.0; }
  // Uniform index in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform01() * n); }

 private:
  std::mt19937_64 engine_;
};

struct EnvConfig {
  Model model = Model::purcell;
  ModelParams params = ModelParams::purcell_defaults();
  int initial_state = 0;  // corner id 0..3
  Direction target = Direction::pos_x;
  double zeta = 0.0;
  std::uint64_t seed = 0;
  int truncation_decimals = 3;
  bool allow_null = true;

  static EnvConfig defaults(Model m);
};

void validate(const EnvConfig& cfg);

struct StepRecord {
  int n = 0;
  SwimmerState state_before;
  SwimmerState state_after;
  Action action;
  double dx_clean = 0;
  double dx_noisy = 0;
  double X = 0;  // cumulative, untruncated
};

struct Transcript {
  EnvConfig config;
  std::vector<StepRecord> records;
  bool aborted = false;

  std::vector<Action> actions() const;
  // Cumulative displacement after the last record (0 when empty).
  double final_X() const { return records.empty() ? 0.0 : records.back().X; }
};

// Truncates toward zero onto a decimal grid.
double truncate_decimals(double x, int decimals);

class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  const EnvConfig& config() const { return cfg_; }
  const SwimmerState& state() const { return state_; }
  Corner corner() const;
  std::vector<Action> valid_actions() const;

  // Integrates `a`, perturbs the displacement with multiplicative noise and
  // appends the record. Throws InvalidActionError for illegal actions.
  const StepRecord& step(const Action& a);

  // Records a null step even when null actions are not offered to controllers.
  const StepRecord& hold();

  double X() const { return X_; }
  // X truncated toward zero to the configured number of decimals.
  double reported_displacement() const;

  const Transcript& transcript() const { return transcript_; }
  Transcript& transcript() { return transcript_; }

  // Test hook: replaces the Uniform[-1, 1) source used for Y.
  void set_noise_source(std::function<double()> source) { noise_override_ = std::move(source); }

 private:
  const StepRecord& record(const Action& a, const StepResult& r);

  EnvConfig cfg_;
  SwimmerState state_;
  double X_ = 0;
  Rng rng_;
  std::function<double()> noise_override_;
  Transcript transcript_;
};

// Builds an environment at the configured corner; throws ConfigError.
Environment env_reset(const EnvConfig& cfg);

// Re-executes the recorded actions under the recorded configuration.
Transcript replay_transcript(const Transcript& t);

}  // namespace microswim
