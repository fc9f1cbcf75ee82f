#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "microswim/backends.hpp"
#include "microswim/environment.hpp"
#include "microswim/experiment.hpp"
#include "microswim/io.hpp"
#include "microswim/llm.hpp"
#include "microswim/oracle.hpp"
#include "microswim/qlearning.hpp"

namespace microswim::cli {

namespace fs = std::filesystem;
namespace ex = microswim::experiment;

namespace {

struct Options {
  // global
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "microswim_out";
  // environment / prompt overrides
  std::optional<std::string> model;
  std::optional<std::string> direction;
  std::optional<double> zeta;
  std::optional<int> start;
  std::optional<int> substeps;
  std::optional<int> n_ht;
  // controller
  std::string backend = "scripted";
  std::string recordings;
  std::optional<std::string> endpoint;
  std::optional<std::string> api_model;
  int max_steps = 50;
  int runs = 10;
  int workers = 1;
  // subcommand specific
  std::string cycle = "signature";
  int cycles = 1;
  int max_len = 4;
  int segments = 400;
  int q_steps = 0;
  int q_runs = 1;
  int after = 0;
  std::vector<double> levels{0, 1, 2, 3};
  std::vector<std::string> level_args;
  const CLI::Option* levels_opt = nullptr;
  std::vector<std::string> omit{"S1", "S2", "S3", "S4", "S5"};
  std::vector<int> nhts{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::string> directions{"+x", "-x"};
};

// Resolution order: model defaults, then the config file, then flags.
io::RunConfig resolve(const Options& o) {
  Model m = Model::purcell;
  nlohmann::json doc;
  if (!o.config.empty()) {
    const auto text = io::read_file(o.config);
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (doc.contains("env") && doc["env"].contains("model")) m = parse_model(doc["env"]["model"].get<std::string>());
  }
  if (o.model) m = parse_model(*o.model);

  io::RunConfig base;
  base.env = EnvConfig::defaults(m);
  base.prompt = llm::PromptConfig::defaults(m, Direction::pos_x);
  io::RunConfig cfg = o.config.empty() ? base : io::run_config_from_json(doc.dump(), base);

  if (cfg.env.model != m) {
    cfg.env.model = m;
    cfg.env.params = ModelParams::defaults(m);
  }
  if (o.direction) cfg.env.target = parse_direction(*o.direction);
  if (o.zeta) cfg.env.zeta = *o.zeta;
  if (o.start) cfg.env.initial_state = *o.start;
  if (o.substeps) cfg.env.params.substeps = *o.substeps;
  if (o.seed) {
    cfg.env.seed = *o.seed;
    cfg.q.seed = *o.seed;
  }
  const bool nht_in_file = doc.contains("prompt") && doc["prompt"].contains("n_ht");
  if (o.n_ht) cfg.prompt.n_ht = *o.n_ht;
  else if (!nht_in_file) cfg.prompt.n_ht = llm::PromptConfig::defaults(m, cfg.env.target).n_ht;

  validate(cfg.env);
  llm::validate(cfg.prompt);
  rl::validate(cfg.q);
  return cfg;
}

Action parse_action_token(const std::string& tok) {
  if (tok == "0") return Action::null();
  if (tok.size() == 2 && (tok[0] == '1' || tok[0] == '2') && (tok[1] == '+' || tok[1] == '-'))
    return {tok[0] - '0', tok[1] == '+' ? 1 : -1};
  throw ex::UsageError("bad action token '" + tok + "' (expected 1+, 1-, 2+, 2- or 0)");
}

std::vector<Action> cycle_actions(const std::string& spec, const EnvConfig& env) {
  const Corner start = Corner::from_id(env.initial_state);
  if (spec == "signature" || spec == "reversed") {
    auto sig = oracle::signature_cycle(env.model, env.params, env.target);
    if (spec == "reversed") sig = sig.reversed();
    return sig.starting_at(start).actions;
  }
  std::vector<Action> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_action_token(tok));
  if (out.empty()) throw ex::UsageError("empty cycle");
  return out;
}

std::string step_csv(const Transcript& t) {
  io::CsvWriter csv({"n", "action", "dx_clean", "dx_noisy", "X"});
  for (const auto& r : t.records)
    csv.row({std::to_string(r.n), format_action(r.action), io::format_double(r.dx_clean),
             io::format_double(r.dx_noisy), io::format_double(r.X)});
  return csv.str();
}

std::string cycle_string(const std::vector<Action>& actions) {
  std::string s;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i > 0) s += "; ";
    s += format_action(actions[i]);
  }
  return s;
}

void write_config(const fs::path& dir, const io::RunConfig& cfg) {
  io::write_file(dir / "config.json", io::run_config_to_json(cfg));
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto cfg = resolve(o);
  if (o.cycles < 0) throw ex::UsageError("--cycles must be >= 0");
  const auto actions = cycle_actions(o.cycle, cfg.env);
  Environment env = env_reset(cfg.env);
  for (int c = 0; c < o.cycles; ++c)
    for (const auto& a : actions) env.step(a);
  const fs::path dir = o.out_dir;
  write_config(dir, cfg);
  io::write_file(dir / "transcript.jsonl", io::transcript_to_jsonl(env.transcript()));
  io::write_file(dir / "stats.csv", step_csv(env.transcript()));
  out << "steps " << env.transcript().records.size() << "\n";
  out << "X " << io::format_double(env.X()) << "\n";
  return 0;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const auto cfg = resolve(o);
  const fs::path dir = o.out_dir;
  oracle::RFTConfig rft;
  rft.segments_per_link = o.segments;
  const double d_max =
      cfg.env.model == Model::purcell ? cfg.env.params.d_max : ModelParams::purcell_defaults().d_max;
  const auto report = oracle::calibrate_convention(rft, {}, d_max);

  io::CsvWriter conv({"s1", "s2", "max_rel_error", "matches", "chosen"});
  for (const auto& row : report.rows)
    conv.row({std::to_string(row.sense.s1), std::to_string(row.sense.s2), io::format_double(row.max_rel_error),
              row.matches ? "1" : "0", row.sense == report.chosen ? "1" : "0"});

  io::CsvWriter probes({"probe", "d1", "d2", "dd1", "dd2", "rel_error_chosen", "non_discriminating"});
  std::size_t chosen_row = 0;
  for (std::size_t r = 0; r < report.rows.size(); ++r)
    if (report.rows[r].sense == report.chosen) chosen_row = r;
  for (std::size_t i = 0; i < report.probes.size(); ++i) {
    const auto& p = report.probes[i];
    probes.row({std::to_string(i), io::format_double(p.state.d1), io::format_double(p.state.d2),
                io::format_double(p.rates.dd1), io::format_double(p.rates.dd2),
                io::format_double(report.rows[chosen_row].per_probe[i]),
                report.non_discriminating[i] ? "1" : "0"});
  }

  io::CsvWriter cycles({"model", "direction", "rank", "start", "length", "actions", "dx_per_cycle", "dx_per_step"});
  for (Model m : {Model::purcell, Model::ng}) {
    const ModelParams params = m == cfg.env.model ? cfg.env.params : ModelParams::defaults(m);
    for (Direction d : {Direction::pos_x, Direction::neg_x}) {
      const auto ranked = oracle::enumerate_cycles(m, params, o.max_len, d, false);
      for (std::size_t k = 0; k < ranked.size(); ++k) {
        const auto& c = ranked[k];
        cycles.row({std::string(to_string(m)), std::string(to_string(d)), std::to_string(k + 1),
                    std::to_string(c.start.id()), std::to_string(c.actions.size()), cycle_string(c.actions),
                    io::format_double(c.dx_per_cycle),
                    io::format_double(c.dx_per_cycle / static_cast<double>(c.actions.size()))});
      }
    }
  }
  write_config(dir, cfg);
  io::write_file(dir / "convention.csv", conv.str());
  io::write_file(dir / "probes.csv", probes.str());
  io::write_file(dir / "cycles.csv", cycles.str());
  out << "convention s1=" << report.chosen.s1 << " s2=" << report.chosen.s2 << "\n";
  for (Model m : {Model::purcell, Model::ng}) {
    const ModelParams params = m == cfg.env.model ? cfg.env.params : ModelParams::defaults(m);
    const auto sig = oracle::signature_cycle(m, params, Direction::pos_x);
    out << to_string(m) << " signature " << cycle_string(sig.actions) << " dX "
        << io::format_double(sig.dx_per_cycle) << "\n";
  }
  return 0;
}

int cmd_train_q(const Options& o, std::ostream& out) {
  auto cfg = resolve(o);
  if (o.q_steps > 0) cfg.q.max_steps = o.q_steps;
  if (o.q_runs <= 0) throw ex::UsageError("--runs must be positive");
  const auto sig = oracle::signature_cycle(cfg.env.model, cfg.env.params, cfg.env.target);
  const fs::path dir = o.out_dir;
  io::CsvWriter summary({"seed", "acquisition_step", "X_final"});
  for (int r = 0; r < o.q_runs; ++r) {
    EnvConfig env = cfg.env;
    rl::QConfig q = cfg.q;
    env.seed = ex::run_seed(cfg.env.seed, r);
    q.seed = ex::run_seed(cfg.q.seed, r);
    const auto res = rl::train(env, q, sig);
    const double x = truncate_decimals(direction_sign(env.target) * res.transcript.final_X(), env.truncation_decimals);
    summary.row({std::to_string(q.seed), res.acquisition_step ? std::to_string(*res.acquisition_step) : "",
                 io::format_fixed(x, env.truncation_decimals)});
    const std::string name = o.q_runs == 1 ? "transcript.jsonl" : "transcript_seed" + std::to_string(q.seed) + ".jsonl";
    io::write_file(dir / name, io::transcript_to_jsonl(res.transcript));
    out << "seed " << q.seed << " acquisition_step "
        << (res.acquisition_step ? std::to_string(*res.acquisition_step) : "none") << "\n";
  }
  write_config(dir, cfg);
  io::write_file(dir / "stats.csv", summary.str());
  return 0;
}

ex::SweepOptions sweep_options(const Options& o) {
  ex::SweepOptions opt;
  opt.controller.kind = ex::parse_backend_kind(o.backend);
  opt.controller.recordings = o.recordings;
  opt.controller.max_steps = o.max_steps;
  if (o.endpoint) opt.controller.http.endpoint = *o.endpoint;
  if (o.api_model) opt.controller.http.model = *o.api_model;
  if (o.max_steps <= 0) throw ex::UsageError("--max-steps must be positive");
  opt.runs = o.runs;
  opt.workers = o.workers;
  return opt;
}

void write_runs(const fs::path& dir, const std::vector<ex::ConditionRuns>& results,
                const std::vector<std::string>& keys) {
  for (const auto& c : results) {
    for (const auto& r : c.runs) {
      const std::string name = "run_" + std::to_string(r.stats.run_id) + ".jsonl";
      io::write_file(dir / "transcripts" / c.condition / name, io::transcript_to_jsonl(r.transcript));
      io::write_file(dir / "exchanges" / c.condition / name, io::exchanges_to_jsonl(r.exchanges));
    }
  }
  io::write_file(dir / "runs.csv", ex::runs_csv(results, keys));
  io::write_file(dir / "summary.csv", ex::summary_csv(results, keys));
  io::write_file(dir / "trajectories.csv", ex::trajectories_csv(results));
}

void print_summary(std::ostream& out, const std::vector<ex::ConditionRuns>& results) {
  for (const auto& c : results)
    out << c.condition << " runs " << c.summary.runs << " mean_X " << io::format_double(c.summary.mean_X) << " p "
        << io::format_double(c.summary.p) << "\n";
}

int cmd_train_llm(const Options& o, std::ostream& out) {
  const auto cfg = resolve(o);
  auto opt = sweep_options(o);
  opt.runs = 1;
  ex::RunContext ctx{"single", 0, cfg.env, cfg.prompt};
  const auto outputs = ex::run_many({ctx}, opt);
  const auto& r = outputs.front();
  const fs::path dir = o.out_dir;
  write_config(dir, cfg);
  io::write_file(dir / "transcript.jsonl", io::transcript_to_jsonl(r.transcript));
  io::write_file(dir / "exchanges.jsonl", io::exchanges_to_jsonl(r.exchanges));
  io::CsvWriter csv({"run_id", "seed", "X_final", "success", "aborted"});
  csv.row({"0", std::to_string(r.stats.seed), io::format_fixed(r.stats.X_final, cfg.env.truncation_decimals),
           r.stats.success ? "1" : "0", r.transcript.aborted ? "1" : "0"});
  io::write_file(dir / "stats.csv", csv.str());
  out << "X_final " << io::format_fixed(r.stats.X_final, cfg.env.truncation_decimals) << " success "
      << (r.stats.success ? 1 : 0) << "\n";
  return 0;
}

std::vector<double> noise_levels(const Options& o) {
  if (o.levels_opt == nullptr || o.levels_opt->count() == 0) return o.levels;
  std::vector<double> out;
  for (const auto& s : o.level_args) {
    if (s.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ex::UsageError("bad noise level '" + s + "'");
    }
  }
  return out;
}

int cmd_noise(const Options& o, std::ostream& out) {
  const auto cfg = resolve(o);
  const auto results = ex::noise_sweep(noise_levels(o), cfg.env, cfg.prompt, sweep_options(o));
  write_config(o.out_dir, cfg);
  write_runs(o.out_dir, results, ex::kNoiseKeys);
  print_summary(out, results);
  return 0;
}

int cmd_ablate(const Options& o, std::ostream& out) {
  const auto cfg = resolve(o);
  std::vector<std::set<int>> masks;
  for (const auto& s : o.omit) {
    std::set<int> mask;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, '+')) {
      if (tok.size() != 2 || (tok[0] != 'S' && tok[0] != 's') || tok[1] < '1' || tok[1] > '5')
        throw ex::UsageError("bad sentence '" + tok + "' (expected S1..S5)");
      mask.insert(tok[1] - '0');
    }
    masks.push_back(mask);
  }
  const auto results = ex::ablation_study(masks, cfg.env, cfg.prompt, sweep_options(o));
  write_config(o.out_dir, cfg);
  write_runs(o.out_dir, results, ex::kAblationKeys);
  print_summary(out, results);
  return 0;
}

int cmd_nht(const Options& o, std::ostream& out) {
  const auto cfg = resolve(o);
  std::vector<Direction> dirs;
  for (const auto& d : o.directions) dirs.push_back(parse_direction(d));
  const auto results = ex::nht_sweep(o.nhts, dirs, cfg.env, cfg.prompt, sweep_options(o));
  write_config(o.out_dir, cfg);
  write_runs(o.out_dir, results, ex::kNhtKeys);
  print_summary(out, results);
  return 0;
}

int cmd_prompt(const Options& o, std::ostream& out) {
  const auto cfg = resolve(o);
  out << ex::prompt_after_signature(cfg.env, cfg.prompt, o.after) << "\n";
  return 0;
}

void add_env_flags(CLI::App* sub, Options& o) {
  sub->add_option("--model", o.model, "Swimmer model: purcell or ng");
  sub->add_option("--direction", o.direction, "Target direction: +x or -x");
  sub->add_option("--zeta", o.zeta, "Noise level");
  sub->add_option("--start", o.start, "Initial corner id 0..3");
  sub->add_option("--substeps", o.substeps, "Integration substeps per action");
}

void add_controller_flags(CLI::App* sub, Options& o) {
  sub->add_option("--n-ht", o.n_ht, "History length");
  sub->add_option("--backend", o.backend, "scripted, replay or http")->capture_default_str();
  sub->add_option("--recordings", o.recordings, "Replay exchanges file or directory");
  sub->add_option("--endpoint", o.endpoint, "Chat completions URL");
  sub->add_option("--api-model", o.api_model, "Model name sent to the endpoint");
  sub->add_option("--max-steps", o.max_steps, "Steps per episode")->capture_default_str();
  sub->add_option("--workers", o.workers, "Concurrent runs")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Discrete-stroke microswimmer simulator, gait oracle and learning harness", "microswim"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "JSON config file (env, prompt, q sections)");
  app.add_option("--seed", o.seed, "Base seed");
  app.add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Execute a fixed action cycle");
  add_env_flags(sim, o);
  sim->add_option("--cycle", o.cycle, "signature, reversed, or actions like 1+,2+,1-,2-")->capture_default_str();
  sim->add_option("--cycles", o.cycles, "Number of traversals")->capture_default_str();

  auto* orc = app.add_subcommand("oracle", "Convention calibration and cycle rankings");
  add_env_flags(orc, o);
  orc->add_option("--max-len", o.max_len, "Longest cycle to enumerate")->capture_default_str();
  orc->add_option("--segments", o.segments, "RFT segments per link")->capture_default_str();

  auto* tq = app.add_subcommand("train-q", "Tabular Q-learning baseline");
  add_env_flags(tq, o);
  tq->add_option("--steps", o.q_steps, "Training steps (overrides config)");
  tq->add_option("--runs", o.q_runs, "Seeds to train, starting at --seed")->capture_default_str();

  auto* tl = app.add_subcommand("train-llm", "One language-model controlled episode");
  add_env_flags(tl, o);
  add_controller_flags(tl, o);

  auto* ns = app.add_subcommand("noise-sweep", "Runs per noise level");
  add_env_flags(ns, o);
  add_controller_flags(ns, o);
  ns->add_option("--runs", o.runs, "Runs per level")->capture_default_str();
  o.levels_opt = ns->add_option("--levels", o.level_args, "Noise levels (default 0,1,2,3)")->delimiter(',')->expected(0, -1);

  auto* ab = app.add_subcommand("ablate", "Single-sentence prompt ablations");
  add_env_flags(ab, o);
  add_controller_flags(ab, o);
  ab->add_option("--runs", o.runs, "Runs per condition")->capture_default_str();
  ab->add_option("--omit", o.omit, "Sentences to omit, one per condition")->delimiter(',')->expected(0, -1);

  auto* nh = app.add_subcommand("nht-sweep", "Runs per history length and direction");
  add_env_flags(nh, o);
  add_controller_flags(nh, o);
  nh->add_option("--runs", o.runs, "Runs per condition")->capture_default_str();
  nh->add_option("--nht", o.nhts, "History lengths")->delimiter(',')->expected(1, -1);
  nh->add_option("--directions", o.directions, "Directions")->delimiter(',')->expected(1, -1);

  auto* pr = app.add_subcommand("prompt", "Print the prompt seen after a number of signature steps");
  add_env_flags(pr, o);
  pr->add_option("--n-ht", o.n_ht, "History length");
  pr->add_option("--after", o.after, "Signature steps executed first")->capture_default_str();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 2;
  }

  const std::map<std::string, int (*)(const Options&, std::ostream&)> handlers = {
      {"simulate", cmd_simulate},     {"oracle", cmd_oracle},     {"train-q", cmd_train_q},
      {"train-llm", cmd_train_llm},   {"noise-sweep", cmd_noise}, {"ablate", cmd_ablate},
      {"nht-sweep", cmd_nht},         {"prompt", cmd_prompt},
  };
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return handlers.at(name)(o, out);
  } catch (const std::invalid_argument& e) {  // ConfigError, UsageError, InvalidActionError
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace microswim::cli
