#pragma once

// A stand-in for a chat model used to produce synthetic replay recordings.
// It reads the DOF levels from the prompt and answers with the signature's
// next move most of the time, in a few surface forms, and otherwise replies
// with a random move or with text that does not parse. Without the levels in
// the prompt it guesses.

#include <array>
#include <regex>
#include <string>

#include "microswim/backends.hpp"
#include "microswim/environment.hpp"
#include "microswim/oracle.hpp"

namespace microswim::support {

inline llm::ScriptedBackend synthetic_backend(const oracle::GaitCycle& signature, std::uint64_t seed,
                                              double accuracy = 0.9) {
  auto rng = std::make_shared<Rng>(seed);
  return llm::ScriptedBackend([signature, rng, accuracy](std::size_t, const std::string& prompt) -> std::string {
    static const std::regex levels(R"(DOF 1 is at level ([01]) and DOF 2 is at level ([01]))");
    static const std::array<const char*, 4> moves = {"DOF 1 ROC +1", "DOF 1 ROC -1", "DOF 2 ROC +1",
                                                     "DOF 2 ROC -1"};
    static const std::array<const char*, 3> noise = {"I am not sure which action is best.", "ROC +1",
                                                     "DOF 3 ROC +1"};
    std::smatch m;
    const double u = rng->uniform01();
    if (std::regex_search(prompt, m, levels) && u < accuracy) {
      const Corner c{m[1] == "1", m[2] == "1"};
      const Action a = signature.starting_at(c).actions.front();
      switch (rng->index(3)) {
        case 0: return format_action(a);
        case 1: return "The next action is " + format_action(a) + ".";
        default: {
          std::string s = "dof" + std::to_string(a.dof) + ", roc " + (a.roc > 0 ? "+1" : "-1");
          return s;
        }
      }
    }
    if (rng->uniform01() < 0.2) return noise[rng->index(noise.size())];
    return moves[rng->index(moves.size())];
  });
}

}  // namespace microswim::support
