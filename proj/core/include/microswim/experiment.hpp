#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "microswim/backends.hpp"
#include "microswim/environment.hpp"
#include "microswim/llm.hpp"
#include "microswim/oracle.hpp"

namespace microswim::experiment {

struct SuccessCriterion {
  int cycles_required = 3;
  int step_budget = 50;
  bool no_subsequent_failure = true;
};

/// Step at which `cycles_required` back-to-back traversals of the signature
/// (entered at any point of the loop) complete, provided they complete within
/// `step_budget` and, when `no_subsequent_failure`, every later action keeps
/// following the loop to the end of the sequence.
std::optional<int> success_step(const std::vector<Action>& actions, const oracle::GaitCycle& signature,
                                const SuccessCriterion& c = {});

/// False for aborted transcripts.
bool detect_success(const Transcript& t, const oracle::GaitCycle& signature, const SuccessCriterion& c = {});

struct RunStats {
  int run_id = 0;
  std::uint64_t seed = 0;
  double X_final = 0;  // truncated, signed so that positive is toward the target
  bool success = false;
};

RunStats run_stats(const Transcript& t, int run_id, const oracle::GaitCycle& signature,
                   const SuccessCriterion& c = {});

struct Summary {
  int runs = 0;
  double mean_X = 0;
  double p = 0;
};

// X_final values are expected on the grid with `decimals` places.
Summary summarize(const std::vector<RunStats>& runs, int decimals = 3);

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class BackendKind { scripted, replay, http };

BackendKind parse_backend_kind(const std::string& s);

struct ControllerSpec {
  BackendKind kind = BackendKind::scripted;
  // Replay: one exchanges file per run at <recordings>/<condition>/run_<id>.jsonl,
  // or a single file used for every run.
  std::filesystem::path recordings;
  llm::HttpConfig http;
  int max_steps = 50;
};

struct RunContext {
  std::string condition;
  int run_id = 0;
  EnvConfig env;
  llm::PromptConfig prompt;
};

std::filesystem::path recording_path(const ControllerSpec& spec, const RunContext& ctx);

std::unique_ptr<llm::ChatBackend> make_backend(const ControllerSpec& spec, const RunContext& ctx,
                                               const oracle::GaitCycle& signature);

struct RunOutput {
  RunContext context;
  RunStats stats;
  Transcript transcript;
  std::vector<llm::Exchange> exchanges;
};

struct ConditionRuns {
  std::string condition;
  // Leading CSV columns identifying the condition, e.g. {"zeta", "3"}.
  std::vector<std::pair<std::string, std::string>> keys;
  std::vector<RunOutput> runs;
  Summary summary;
};

struct SweepOptions {
  ControllerSpec controller;
  SuccessCriterion criterion;
  int runs = 10;
  int workers = 1;
};

// Seed of run `run_id` derived from the base environment seed.
std::uint64_t run_seed(std::uint64_t base, int run_id);

/// Runs every context on a bounded worker pool; results keep input order.
std::vector<RunOutput> run_many(const std::vector<RunContext>& contexts, const SweepOptions& opt);

/// opt.runs seeded runs per noise level. No levels gives an empty table.
std::vector<ConditionRuns> noise_sweep(const std::vector<double>& levels, const EnvConfig& env,
                                       const llm::PromptConfig& prompt, const SweepOptions& opt);

/// A full-prompt control followed by one condition per mask. Every mask must
/// hold exactly one sentence number (UsageError otherwise).
std::vector<ConditionRuns> ablation_study(const std::vector<std::set<int>>& masks, const EnvConfig& env,
                                          const llm::PromptConfig& prompt, const SweepOptions& opt);

/// One condition per (direction, n_ht) pair.
std::vector<ConditionRuns> nht_sweep(const std::vector<int>& nhts, const std::vector<Direction>& directions,
                                     const EnvConfig& env, const llm::PromptConfig& prompt,
                                     const SweepOptions& opt);

/// Prompt a controller sees after `steps` moves along the signature from the
/// configured start corner.
std::string prompt_after_signature(const EnvConfig& env, const llm::PromptConfig& prompt, int steps);

// Condition labels double as recording subdirectory names.
std::string noise_label(double zeta);
std::string ablation_label(const std::set<int>& mask);
std::string nht_label(int n_ht, Direction d);

// Per-run CSV: key columns, run_id, seed, X_final, success. `key_columns`
// names the key columns of an empty table.
std::string runs_csv(const std::vector<ConditionRuns>& results, const std::vector<std::string>& key_columns = {});
// Per-condition CSV: key columns, runs, mean_X, p.
std::string summary_csv(const std::vector<ConditionRuns>& results,
                        const std::vector<std::string>& key_columns = {});
// Key column names of each sweep.
inline const std::vector<std::string> kNoiseKeys{"zeta"};
inline const std::vector<std::string> kAblationKeys{"omitted_sentence"};
inline const std::vector<std::string> kNhtKeys{"direction", "n_ht"};

// Rebuilds a condition from saved transcripts (run_id taken from position).
ConditionRuns condition_from_transcripts(std::string condition,
                                         std::vector<std::pair<std::string, std::string>> keys,
                                         const std::vector<Transcript>& transcripts,
                                         const SuccessCriterion& c = {});
// X trajectories for plotting: condition, run_id, n, X.
std::string trajectories_csv(const std::vector<ConditionRuns>& results);

}  // namespace microswim::experiment
