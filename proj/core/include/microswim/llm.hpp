#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "microswim/environment.hpp"

namespace microswim::llm {

// ---------------------------------------------------------------------------
// Prompt configuration

inline constexpr int kNumSentences = 5;

struct PromptConfig {
  // Templates S1..S5. Placeholders: {direction} {d1_level} {d2_level}
  // {count} {history} {position} {actions}.
  std::array<std::string, kNumSentences> sentences;
  int n_ht = 2;
  double x_min = -100.0;
  int stall_window = 4;
  double stall_threshold = 0.01;
  // Applied in order to the rendered text.
  std::vector<std::pair<std::string, std::string>> aliases;
  // Sentence numbers (1..5) left out of the prompt.
  std::set<int> ablation_mask;
  double temperature = 0.0;
  int max_retries = 3;
  std::string correction = "Your last reply was not one of the allowed actions, so reply again.";
  // Version tag of the template wording; bump when `sentences` change.
  std::string template_version = "1";

  static PromptConfig defaults(Model m, Direction d);
};

void validate(const PromptConfig& cfg);

// Canonical five sentences and alias table.
std::array<std::string, kNumSentences> default_sentences();
std::vector<std::pair<std::string, std::string>> default_aliases();

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// History

struct HistoryEntry {
  Action action;
  std::int64_t position = 0;  // transformed displacement after the action
};

class HistoryBuffer {
 public:
  explicit HistoryBuffer(std::size_t capacity = 0) : capacity_(capacity) {}

  void push(const HistoryEntry& e);
  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const std::deque<HistoryEntry>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::deque<HistoryEntry> entries_;
};

// What the prompt needs to know about the swimmer right now.
struct EnvSummary {
  Direction target = Direction::pos_x;
  Corner corner;
  std::vector<Action> legal;
  std::int64_t position = 0;  // transformed current displacement
};

EnvSummary summarize(const Environment& env, const PromptConfig& cfg);

// ---------------------------------------------------------------------------
// Operations

/// round((x - x_min) * 1000). x is expected on the 3-decimal grid.
/// Throws RangeError when x < x_min.
std::int64_t transform_displacement(double x, double x_min);

/// Renders S1..S5 in order, one sentence per line, skipping masked sentences.
/// Throws TemplateError on an unresolved placeholder.
std::string build_prompt(const PromptConfig& cfg, const HistoryBuffer& buf, const EnvSummary& env);

/// First "DOF <1|2> ROC <-1|0|+1>" in the text, case-insensitive, punctuation
/// tolerated between tokens. Throws ParseError.
Action parse_action(const std::string& response);

/// Empty buffer when the window is full and |sum| < stall_threshold; `buf` otherwise.
HistoryBuffer maybe_clear_history(const HistoryBuffer& buf, const std::deque<double>& window,
                                  const PromptConfig& cfg);

// Numeric tokens that are negative or fractional, ignoring the ROC action
// vocabulary ("ROC -1"). Empty for a well-formed prompt.
std::vector<std::string> offending_numeric_tokens(const std::string& prompt);

// ---------------------------------------------------------------------------
// Backends

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReplayExhaustedError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::string& prompt, double temperature) = 0;
};

// ---------------------------------------------------------------------------
// Episode

struct Exchange {
  int step = 0;
  int attempt = 0;
  std::string prompt;
  std::string response;
  double temperature = 0.0;
};

struct EpisodeResult {
  Transcript transcript;
  std::vector<Exchange> exchanges;
  int history_clears = 0;
  std::string abort_reason;
};

/// Few-shot control loop: prompt, query, parse, validate, step, record.
/// Illegal or unparsable replies are retried up to cfg.max_retries times with
/// a correction appended; after that the step is recorded as a null action.
/// A BackendError ends the episode with transcript.aborted set.
EpisodeResult run_llm_episode(Environment& env, ChatBackend& backend, const PromptConfig& cfg,
                              int max_steps);

}  // namespace microswim::llm
