#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "microswim/environment.hpp"
#include "microswim/llm.hpp"
#include "microswim/qlearning.hpp"

namespace microswim::io {

inline constexpr int kTranscriptSchemaVersion = 1;

// Transcript as JSON Lines: a header line carrying the schema version, the
// environment config and the aborted flag, then one StepRecord per line.
std::string transcript_to_jsonl(const Transcript& t);
Transcript transcript_from_jsonl(std::string_view text);

std::string exchanges_to_jsonl(const std::vector<llm::Exchange>& exchanges);
std::vector<llm::Exchange> exchanges_from_jsonl(std::string_view text);

// Structured config document. Missing keys keep their defaults.
struct RunConfig {
  EnvConfig env;
  llm::PromptConfig prompt;
  rl::QConfig q;
};

std::string env_config_to_json(const EnvConfig& cfg);
std::string run_config_to_json(const RunConfig& cfg);
// Overlays the JSON document onto `base`. Throws ConfigError.
RunConfig run_config_from_json(std::string_view text, RunConfig base);

// RFC-4180 CSV writer.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

 private:
  void write_fields(const std::vector<std::string>& fields);
  std::size_t columns_;
  std::string out_;
};

std::string csv_escape(std::string_view field);
// Shortest representation that round-trips.
std::string format_double(double v);
// Fixed with the given number of decimals.
std::string format_fixed(double v, int decimals);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

}  // namespace microswim::io
