#pragma once

// Configurations under which the synthetic recordings in fixtures/recordings
// were produced. Replaying them requires the same settings.

#include <set>
#include <string>
#include <vector>

#include "microswim/environment.hpp"
#include "microswim/llm.hpp"

namespace microswim::support {

inline constexpr int kRecordingRuns = 5;
inline constexpr int kRecordingSteps = 50;
inline const std::vector<double> kRecordingLevels{0.0, 3.0};
inline const std::vector<std::set<int>> kRecordingMasks{{1}, {2}, {3}, {4}, {5}};

inline EnvConfig recording_env() {
  auto e = EnvConfig::defaults(Model::ng);
  e.seed = 100;
  return e;
}

inline llm::PromptConfig recording_prompt() { return llm::PromptConfig::defaults(Model::ng, Direction::pos_x); }

// Single episode used for byte-identical replay.
inline EnvConfig episode_env() {
  auto e = EnvConfig::defaults(Model::ng);
  e.zeta = 0.5;
  e.seed = 11;
  return e;
}

}  // namespace microswim::support
