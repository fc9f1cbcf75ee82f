#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "microswim/llm.hpp"
#include "microswim/oracle.hpp"

namespace microswim::llm {

// Wraps a deterministic policy as a text emitter. The policy sees the call
// index (0-based, counting every query including retries) and the prompt.
class ScriptedBackend : public ChatBackend {
 public:
  using Policy = std::function<std::string(std::size_t call, const std::string& prompt)>;
  explicit ScriptedBackend(Policy policy) : policy_(std::move(policy)) {}

  std::string complete(const std::string& prompt, double temperature) override;

  std::size_t calls() const { return calls_; }
  double last_temperature() const { return last_temperature_; }

 private:
  Policy policy_;
  std::size_t calls_ = 0;
  double last_temperature_ = -1.0;
};

// Emits the cycle's actions in order, forever, assuming each one is executed.
// The cycle must start at the corner the episode starts from.
ScriptedBackend cycle_backend(const oracle::GaitCycle& cycle);

// Returns recorded responses in order; throws ReplayExhaustedError afterwards.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(std::vector<std::string> responses) : responses_(std::move(responses)) {}

  std::string complete(const std::string& prompt, double temperature) override;
  std::size_t remaining() const { return responses_.size() - next_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

std::vector<std::string> responses_of(const std::vector<Exchange>& exchanges);

struct HttpConfig {
  // Full chat-completions URL, e.g. https://api.openai.com/v1/chat/completions
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4";
  std::string api_key_env = "MICROSWIM_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int max_retries = 5;
  std::chrono::milliseconds backoff_base{1000};
  // Process-wide minimum spacing between requests; zero disables it.
  std::chrono::milliseconds min_interval{0};
};

class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

// OpenAI-compatible chat completion with one user message. Transport errors,
// HTTP 429 and 5xx are retried with exponential backoff; 401/403 are not.
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(HttpConfig cfg);

  std::string complete(const std::string& prompt, double temperature) override;

  // Request body for a prompt; exposed for tests.
  std::string request_body(const std::string& prompt, double temperature) const;
  // First choice's message content; throws BackendError on malformed bodies.
  static std::string extract_content(const std::string& body);

 private:
  HttpConfig cfg_;
  std::string api_key_;
};

}  // namespace microswim::llm
