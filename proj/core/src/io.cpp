#include "microswim/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace microswim::io {

using nlohmann::json;

namespace {

json state_to_json(const SwimmerState& s) {
  if (const auto* p = std::get_if<PurcellState>(&s))
    return {{"d1", p->d1}, {"d2", p->d2}, {"dc", p->dc}, {"x", p->x}, {"y", p->y}};
  const auto& n = std::get<NGState>(s);
  return {{"d1", n.d1}, {"d2", n.d2}, {"x", n.x}};
}

SwimmerState state_from_json(const json& j, Model m) {
  if (m == Model::purcell)
    return PurcellState{j.at("d1").get<double>(), j.at("d2").get<double>(), j.at("dc").get<double>(),
                        j.at("x").get<double>(), j.at("y").get<double>()};
  return NGState{j.at("d1").get<double>(), j.at("d2").get<double>(), j.at("x").get<double>()};
}

json action_to_json(const Action& a) { return {{"dof", a.dof}, {"roc", a.roc}}; }

Action action_from_json(const json& j) { return {j.at("dof").get<int>(), j.at("roc").get<int>()}; }

json env_json(const EnvConfig& c) {
  return {
      {"model", std::string(to_string(c.model))},
      {"params", {{"d_max", c.params.d_max}, {"d_min", c.params.d_min}, {"substeps", c.params.substeps}}},
      {"initial_state", c.initial_state},
      {"target_direction", std::string(to_string(c.target))},
      {"zeta", c.zeta},
      {"seed", c.seed},
      {"truncation_decimals", c.truncation_decimals},
      {"allow_null", c.allow_null},
  };
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

EnvConfig env_from_json(const json& j, EnvConfig c) {
  if (j.contains("model")) {
    const Model m = parse_model(j.at("model").get<std::string>());
    if (m != c.model) c.params = ModelParams::defaults(m);
    c.model = m;
  }
  if (j.contains("params")) {
    const auto& p = j.at("params");
    take(p, "d_max", c.params.d_max);
    take(p, "d_min", c.params.d_min);
    take(p, "substeps", c.params.substeps);
  }
  take(j, "initial_state", c.initial_state);
  if (j.contains("target_direction")) c.target = parse_direction(j.at("target_direction").get<std::string>());
  take(j, "zeta", c.zeta);
  take(j, "seed", c.seed);
  take(j, "truncation_decimals", c.truncation_decimals);
  take(j, "allow_null", c.allow_null);
  return c;
}

json prompt_json(const llm::PromptConfig& c) {
  json aliases = json::array();
  for (const auto& [from, to] : c.aliases) aliases.push_back({from, to});
  json mask = json::array();
  for (int s : c.ablation_mask) mask.push_back("S" + std::to_string(s));
  return {
      {"sentences", c.sentences},   {"n_ht", c.n_ht},
      {"x_min", c.x_min},           {"stall_window", c.stall_window},
      {"stall_threshold", c.stall_threshold},
      {"aliases", aliases},         {"ablation_mask", mask},
      {"temperature", c.temperature},
      {"max_retries", c.max_retries},
      {"correction", c.correction}, {"template_version", c.template_version},
  };
}

int sentence_number(const json& j) {
  if (j.is_number_integer()) return j.get<int>();
  const auto s = j.get<std::string>();
  if (s.size() == 2 && (s[0] == 'S' || s[0] == 's') && s[1] >= '1' && s[1] <= '5') return s[1] - '0';
  throw ConfigError("ablation_mask entries must be S1..S5");
}

llm::PromptConfig prompt_from_json(const json& j, llm::PromptConfig c) {
  if (j.contains("sentences")) {
    const auto& s = j.at("sentences");
    if (!s.is_array() || s.size() != llm::kNumSentences) throw ConfigError("sentences must hold five templates");
    for (std::size_t i = 0; i < s.size(); ++i) c.sentences[i] = s[i].get<std::string>();
  }
  take(j, "n_ht", c.n_ht);
  take(j, "x_min", c.x_min);
  take(j, "stall_window", c.stall_window);
  take(j, "stall_threshold", c.stall_threshold);
  if (j.contains("aliases")) {
    c.aliases.clear();
    for (const auto& pair : j.at("aliases"))
      c.aliases.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
  }
  if (j.contains("ablation_mask")) {
    c.ablation_mask.clear();
    for (const auto& s : j.at("ablation_mask")) c.ablation_mask.insert(sentence_number(s));
  }
  take(j, "temperature", c.temperature);
  take(j, "max_retries", c.max_retries);
  take(j, "correction", c.correction);
  take(j, "template_version", c.template_version);
  return c;
}

json q_json(const rl::QConfig& c) {
  return {{"alpha", c.alpha},     {"gamma", c.gamma}, {"epsilon", c.epsilon},
          {"epsilon_decay", c.epsilon_decay}, {"seed", c.seed}, {"max_steps", c.max_steps}};
}

rl::QConfig q_from_json(const json& j, rl::QConfig c) {
  take(j, "alpha", c.alpha);
  take(j, "gamma", c.gamma);
  take(j, "epsilon", c.epsilon);
  take(j, "epsilon_decay", c.epsilon_decay);
  take(j, "seed", c.seed);
  take(j, "max_steps", c.max_steps);
  return c;
}

std::vector<json> parse_lines(std::string_view text) {
  std::vector<json> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    if (!line.empty()) out.push_back(json::parse(line));
    pos = end + 1;
  }
  return out;
}

}  // namespace

std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  json header = {{"schema_version", kTranscriptSchemaVersion},
                 {"config", env_json(t.config)},
                 {"aborted", t.aborted}};
  out += header.dump() + "\n";
  for (const auto& r : t.records) {
    json line = {{"n", r.n},
                 {"state_before", state_to_json(r.state_before)},
                 {"state_after", state_to_json(r.state_after)},
                 {"action", action_to_json(r.action)},
                 {"dx_clean", r.dx_clean},
                 {"dx_noisy", r.dx_noisy},
                 {"X", r.X}};
    out += line.dump() + "\n";
  }
  return out;
}

Transcript transcript_from_jsonl(std::string_view text) {
  const auto lines = parse_lines(text);
  if (lines.empty() || !lines.front().contains("schema_version"))
    throw ConfigError("transcript: missing header line");
  const auto& header = lines.front();
  if (header.at("schema_version").get<int>() != kTranscriptSchemaVersion)
    throw ConfigError("transcript: unsupported schema version");
  Transcript t;
  t.config = env_from_json(header.at("config"), EnvConfig{});
  t.aborted = header.value("aborted", false);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& j = lines[i];
    StepRecord r;
    r.n = j.at("n").get<int>();
    r.state_before = state_from_json(j.at("state_before"), t.config.model);
    r.state_after = state_from_json(j.at("state_after"), t.config.model);
    r.action = action_from_json(j.at("action"));
    r.dx_clean = j.at("dx_clean").get<double>();
    r.dx_noisy = j.at("dx_noisy").get<double>();
    r.X = j.at("X").get<double>();
    t.records.push_back(r);
  }
  return t;
}

std::string exchanges_to_jsonl(const std::vector<llm::Exchange>& exchanges) {
  std::string out;
  for (const auto& e : exchanges) {
    json line = {{"step", e.step},
                 {"attempt", e.attempt},
                 {"temperature", e.temperature},
                 {"prompt", e.prompt},
                 {"response", e.response}};
    out += line.dump() + "\n";
  }
  return out;
}

std::vector<llm::Exchange> exchanges_from_jsonl(std::string_view text) {
  std::vector<llm::Exchange> out;
  for (const auto& j : parse_lines(text)) {
    llm::Exchange e;
    e.step = j.value("step", 0);
    e.attempt = j.value("attempt", 0);
    e.temperature = j.value("temperature", 0.0);
    e.prompt = j.value("prompt", std::string{});
    e.response = j.at("response").get<std::string>();
    out.push_back(std::move(e));
  }
  return out;
}

std::string env_config_to_json(const EnvConfig& cfg) { return env_json(cfg).dump(2); }

std::string run_config_to_json(const RunConfig& cfg) {
  json j = {{"env", env_json(cfg.env)}, {"prompt", prompt_json(cfg.prompt)}, {"q", q_json(cfg.q)}};
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(std::string_view text, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    if (j.contains("env")) base.env = env_from_json(j.at("env"), base.env);
    if (j.contains("prompt")) base.prompt = prompt_from_json(j.at("prompt"), base.prompt);
    if (j.contains("q")) base.q = q_from_json(j.at("q"), base.q);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return base;
}

std::string csv_escape(std::string_view field) {
  const bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!quote) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  write_fields(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::invalid_argument("csv: column count mismatch");
  write_fields(fields);
}

void CsvWriter::write_fields(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ += ',';
    out_ += csv_escape(fields[i]);
  }
  out_ += "\r\n";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, std::string_view content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace microswim::io
