#include "microswim/llm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

namespace microswim::llm {

std::array<std::string, kNumSentences> default_sentences() {
  return {
      "Find the rate of change sequence of both degrees of freedom that moves the swimmer "
      "fastest in the {direction} direction in the long run.",
      "Each degree of freedom is at level 0 or level 1 and only one of them changes per step, "
      "with rate of change +1 from level 0, rate of change -1 from level 1 and rate of change 0 "
      "for no change, and now degree of freedom 1 is at level {d1_level} and degree of freedom 2 "
      "is at level {d2_level}.",
      "The last {count} actions and the positions they led to were {history}, and the current "
      "position is {position}.",
      "Keep in mind that an action can change the position over many later steps, so judge it "
      "by its long-term effect.",
      "Reply with the next action only, chosen from {actions}, in the form DOF d ROC r.",
  };
}

std::vector<std::pair<std::string, std::string>> default_aliases() {
  return {{"degrees of freedom", "DOFs"},
          {"degree of freedom", "DOF"},
          {"rate of change", "ROC"}};
}

PromptConfig PromptConfig::defaults(Model m, Direction d) {
  PromptConfig cfg;
  cfg.sentences = default_sentences();
  cfg.aliases = default_aliases();
  if (m == Model::ng) cfg.n_ht = d == Direction::pos_x ? 3 : 6;
  else cfg.n_ht = 2;
  return cfg;
}

void validate(const PromptConfig& cfg) {
  if (cfg.n_ht < 0) throw ConfigError("n_ht must be >= 0");
  if (!(cfg.stall_threshold > 0.0)) throw ConfigError("stall_threshold must be > 0");
  if (cfg.stall_window <= 0) throw ConfigError("stall_window must be positive");
  if (cfg.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (!(cfg.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  for (int s : cfg.ablation_mask)
    if (s < 1 || s > kNumSentences) throw ConfigError("ablation_mask entries must lie in 1..5");
}

void HistoryBuffer::push(const HistoryEntry& e) {
  if (capacity_ == 0) return;
  entries_.push_back(e);
  while (entries_.size() > capacity_) entries_.pop_front();
}

EnvSummary summarize(const Environment& env, const PromptConfig& cfg) {
  EnvSummary s;
  s.target = env.config().target;
  s.corner = env.corner();
  s.legal = env.valid_actions();
  s.position = transform_displacement(env.reported_displacement(), cfg.x_min);
  return s;
}

std::int64_t transform_displacement(double x, double x_min) {
  if (x < x_min) throw RangeError("displacement below x_min; increase the transform baseline");
  return std::llround((x - x_min) * 1000.0);
}

namespace {

std::string join_actions(const std::vector<Action>& actions) {
  std::string out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i > 0) out += i + 1 == actions.size() ? " or " : ", ";
    out += format_action(actions[i]);
  }
  return out;
}

std::string render_history(const HistoryBuffer& buf) {
  if (buf.empty()) return "none";
  std::string out;
  bool first = true;
  for (const auto& e : buf.entries()) {
    if (!first) out += "; ";
    first = false;
    out += format_action(e.action) + " gave " + std::to_string(e.position);
  }
  return out;
}

std::string substitute(const std::string& tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] != '{') {
      out += tmpl[i++];
      continue;
    }
    const auto close = tmpl.find('}', i);
    if (close == std::string::npos) throw TemplateError("unterminated placeholder in template");
    const std::string key = tmpl.substr(i + 1, close - i - 1);
    const auto it = values.find(key);
    if (it == values.end()) throw TemplateError("unresolved placeholder {" + key + "}");
    out += it->second;
    i = close + 1;
  }
  return out;
}

std::string apply_aliases(std::string text, const std::vector<std::pair<std::string, std::string>>& aliases) {
  for (const auto& [from, to] : aliases) {
    if (from.empty()) continue;
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
      text.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  return text;
}

}  // namespace

std::string build_prompt(const PromptConfig& cfg, const HistoryBuffer& buf, const EnvSummary& env) {
  const std::map<std::string, std::string> values{
      {"direction", env.target == Direction::pos_x ? "positive x" : "negative x"},
      {"d1_level", env.corner.d1_high ? "1" : "0"},
      {"d2_level", env.corner.d2_high ? "1" : "0"},
      {"count", std::to_string(buf.size())},
      {"history", render_history(buf)},
      {"position", std::to_string(env.position)},
      {"actions", join_actions(env.legal)},
  };
  std::string out;
  for (int i = 0; i < kNumSentences; ++i) {
    if (cfg.ablation_mask.contains(i + 1)) continue;
    std::string sentence = apply_aliases(substitute(cfg.sentences[i], values), cfg.aliases);
    const auto periods = std::count(sentence.begin(), sentence.end(), '.');
    if (periods != 1 || sentence.back() != '.')
      throw TemplateError("sentence S" + std::to_string(i + 1) + " must render to exactly one sentence");
    if (!out.empty()) out += '\n';
    out += sentence;
  }
  return out;
}

Action parse_action(const std::string& response) {
  static const std::regex grammar(R"(\bdof\W*([0-9]+)\W*?roc\W*?([+-]?[0-9]+)(?![0-9]|\.[0-9]))",
                                  std::regex::icase);
  std::smatch m;
  if (!std::regex_search(response, m, grammar)) throw ParseError("no 'DOF <n> ROC <r>' action in reply");
  const int dof = std::stoi(m[1].str());
  const int roc = std::stoi(m[2].str());
  if (dof != 1 && dof != 2) throw ParseError("DOF index out of range");
  if (roc < -1 || roc > 1) throw ParseError("ROC out of range");
  return {dof, roc};
}

namespace {

bool stalled(const std::deque<double>& window, const PromptConfig& cfg) {
  if (static_cast<int>(window.size()) < cfg.stall_window) return false;
  double sum = 0.0;
  for (double d : window) sum += d;
  return std::abs(sum) < cfg.stall_threshold;
}

}  // namespace

HistoryBuffer maybe_clear_history(const HistoryBuffer& buf, const std::deque<double>& window,
                                  const PromptConfig& cfg) {
  return stalled(window, cfg) ? HistoryBuffer(buf.capacity()) : buf;
}

std::vector<std::string> offending_numeric_tokens(const std::string& prompt) {
  static const std::regex token(R"([+-]?[0-9]+(?:\.[0-9]+)?)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(prompt.begin(), prompt.end(), token);
       it != std::sregex_iterator(); ++it) {
    const std::string t = it->str();
    const bool negative = t.front() == '-';
    const bool fractional = t.find('.') != std::string::npos;
    if (!negative && !fractional) continue;
    const auto pos = static_cast<std::size_t>(it->position());
    const bool roc_symbol = !fractional && t == "-1" && pos >= 4 && prompt.compare(pos - 4, 4, "ROC ") == 0;
    if (!roc_symbol) out.push_back(t);
  }
  return out;
}

EpisodeResult run_llm_episode(Environment& env, ChatBackend& backend, const PromptConfig& cfg,
                              int max_steps) {
  validate(cfg);
  EpisodeResult result;
  HistoryBuffer buf(static_cast<std::size_t>(cfg.n_ht));
  std::deque<double> window;

  for (int step = 1; step <= max_steps; ++step) {
    const EnvSummary summary = summarize(env, cfg);
    const std::string base = build_prompt(cfg, buf, summary);
    std::string prompt = base;
    std::optional<Action> chosen;
    for (int attempt = 0; attempt <= cfg.max_retries && !chosen; ++attempt) {
      std::string reply;
      try {
        reply = backend.complete(prompt, cfg.temperature);
      } catch (const BackendError& e) {
        result.transcript = env.transcript();
        result.transcript.aborted = true;
        result.abort_reason = e.what();
        return result;
      }
      result.exchanges.push_back({step, attempt, prompt, reply, cfg.temperature});
      try {
        const Action a = parse_action(reply);
        for (const auto& legal : summary.legal)
          if (legal == a) chosen = a.is_null() ? Action::null() : a;
      } catch (const ParseError&) {
      }
      if (!chosen) prompt = base + "\n" + cfg.correction;
    }

    const StepRecord& rec = chosen ? env.step(*chosen) : env.hold();
    buf.push({rec.action, transform_displacement(env.reported_displacement(), cfg.x_min)});
    window.push_back(rec.dx_noisy);
    while (static_cast<int>(window.size()) > cfg.stall_window) window.pop_front();
    if (stalled(window, cfg)) {
      buf = maybe_clear_history(buf, window, cfg);
      window.clear();
      ++result.history_clears;
    }
  }
  result.transcript = env.transcript();
  return result;
}

}  // namespace microswim::llm
