#include "microswim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "microswim/io.hpp"

namespace microswim::experiment {

namespace {

// Does actions[from..] follow the loop entered at phase `phase`, up to `end`?
bool follows(const std::vector<Action>& actions, const std::vector<Action>& loop, std::size_t from,
             std::size_t phase, std::size_t end) {
  const std::size_t L = loop.size();
  for (std::size_t j = from; j < end; ++j)
    if (!(actions[j] == loop[(phase + j - from) % L])) return false;
  return true;
}

oracle::GaitCycle signature_for(const EnvConfig& env) {
  return oracle::signature_cycle(env.model, env.params, env.target);
}

}  // namespace

std::optional<int> success_step(const std::vector<Action>& actions, const oracle::GaitCycle& signature,
                                const SuccessCriterion& c) {
  const auto& loop = signature.actions;
  if (loop.empty() || c.cycles_required <= 0) return std::nullopt;
  const std::size_t need = loop.size() * static_cast<std::size_t>(c.cycles_required);
  const std::size_t n = actions.size();
  for (std::size_t i = 0; i + need <= n; ++i) {
    const std::size_t done = i + need;
    if (done > static_cast<std::size_t>(c.step_budget)) break;
    for (std::size_t phase = 0; phase < loop.size(); ++phase) {
      const std::size_t end = c.no_subsequent_failure ? n : done;
      if (follows(actions, loop, i, phase, end)) return static_cast<int>(done);
    }
  }
  return std::nullopt;
}

bool detect_success(const Transcript& t, const oracle::GaitCycle& signature, const SuccessCriterion& c) {
  if (t.aborted) return false;
  return success_step(t.actions(), signature, c).has_value();
}

RunStats run_stats(const Transcript& t, int run_id, const oracle::GaitCycle& signature,
                   const SuccessCriterion& c) {
  RunStats s;
  s.run_id = run_id;
  s.seed = t.config.seed;
  s.X_final = truncate_decimals(direction_sign(t.config.target) * t.final_X(), t.config.truncation_decimals);
  s.success = detect_success(t, signature, c);
  return s;
}

Summary summarize(const std::vector<RunStats>& runs, int decimals) {
  Summary s;
  s.runs = static_cast<int>(runs.size());
  if (runs.empty()) return s;
  // Summing on the integer grid keeps the mean independent of run order.
  const double scale = std::pow(10.0, decimals);
  std::int64_t sum = 0;
  int wins = 0;
  for (const auto& r : runs) {
    sum += std::llround(r.X_final * scale);
    wins += r.success ? 1 : 0;
  }
  s.mean_X = static_cast<double>(sum) / (scale * s.runs);
  s.p = static_cast<double>(wins) / s.runs;
  return s;
}

BackendKind parse_backend_kind(const std::string& s) {
  if (s == "scripted") return BackendKind::scripted;
  if (s == "replay") return BackendKind::replay;
  if (s == "http") return BackendKind::http;
  throw UsageError("unknown backend '" + s + "' (expected scripted, replay or http)");
}

std::filesystem::path recording_path(const ControllerSpec& spec, const RunContext& ctx) {
  if (std::filesystem::is_regular_file(spec.recordings)) return spec.recordings;
  return spec.recordings / ctx.condition / ("run_" + std::to_string(ctx.run_id) + ".jsonl");
}

std::unique_ptr<llm::ChatBackend> make_backend(const ControllerSpec& spec, const RunContext& ctx,
                                               const oracle::GaitCycle& signature) {
  switch (spec.kind) {
    case BackendKind::scripted:
      return std::make_unique<llm::ScriptedBackend>(
          llm::cycle_backend(signature.starting_at(Corner::from_id(ctx.env.initial_state))));
    case BackendKind::replay: {
      if (spec.recordings.empty()) throw UsageError("replay backend needs a recordings path");
      const auto text = io::read_file(recording_path(spec, ctx));
      return std::make_unique<llm::ReplayBackend>(llm::responses_of(io::exchanges_from_jsonl(text)));
    }
    case BackendKind::http:
      return std::make_unique<llm::HttpBackend>(spec.http);
  }
  throw UsageError("unknown backend kind");
}

std::uint64_t run_seed(std::uint64_t base, int run_id) { return base + static_cast<std::uint64_t>(run_id); }

std::vector<RunOutput> run_many(const std::vector<RunContext>& contexts, const SweepOptions& opt) {
  // Signatures depend only on model, params and direction.
  using Key = std::tuple<int, double, double, int, int>;
  std::map<Key, oracle::GaitCycle> signatures;
  for (const auto& ctx : contexts) {
    const auto& e = ctx.env;
    const Key k{static_cast<int>(e.model), e.params.d_max, e.params.d_min, e.params.substeps,
                static_cast<int>(e.target)};
    if (!signatures.count(k)) signatures.emplace(k, signature_for(e));
  }
  auto signature_of = [&](const EnvConfig& e) -> const oracle::GaitCycle& {
    return signatures.at(Key{static_cast<int>(e.model), e.params.d_max, e.params.d_min, e.params.substeps,
                             static_cast<int>(e.target)});
  };

  std::vector<RunOutput> out(contexts.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= contexts.size()) return;
      try {
        const auto& ctx = contexts[i];
        const auto& sig = signature_of(ctx.env);
        auto backend = make_backend(opt.controller, ctx, sig);
        Environment env = env_reset(ctx.env);
        auto res = llm::run_llm_episode(env, *backend, ctx.prompt, opt.controller.max_steps);
        RunOutput& r = out[i];
        r.context = ctx;
        r.stats = run_stats(res.transcript, ctx.run_id, sig, opt.criterion);
        r.transcript = std::move(res.transcript);
        r.exchanges = std::move(res.exchanges);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(contexts.size());
        return;
      }
    }
  };

  const std::size_t n_workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opt.workers, 1)), 1, std::max<std::size_t>(contexts.size(), 1));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

struct Condition {
  std::string label;
  std::vector<std::pair<std::string, std::string>> keys;
  EnvConfig env;
  llm::PromptConfig prompt;
};

std::vector<ConditionRuns> run_conditions(const std::vector<Condition>& conds, const SweepOptions& opt) {
  if (opt.runs <= 0) throw UsageError("runs must be positive");
  std::vector<RunContext> contexts;
  for (const auto& c : conds) {
    validate(c.env);
    llm::validate(c.prompt);
    for (int r = 0; r < opt.runs; ++r) {
      RunContext ctx{c.label, r, c.env, c.prompt};
      ctx.env.seed = run_seed(c.env.seed, r);
      contexts.push_back(std::move(ctx));
    }
  }
  auto outputs = run_many(contexts, opt);
  std::vector<ConditionRuns> result;
  std::size_t k = 0;
  for (const auto& c : conds) {
    ConditionRuns cr;
    cr.condition = c.label;
    cr.keys = c.keys;
    std::vector<RunStats> stats;
    for (int r = 0; r < opt.runs; ++r, ++k) {
      stats.push_back(outputs[k].stats);
      cr.runs.push_back(std::move(outputs[k]));
    }
    cr.summary = summarize(stats, c.env.truncation_decimals);
    result.push_back(std::move(cr));
  }
  return result;
}

}  // namespace

std::string prompt_after_signature(const EnvConfig& env_cfg, const llm::PromptConfig& prompt, int steps) {
  if (steps < 0) throw UsageError("steps must be >= 0");
  const auto loop = signature_for(env_cfg).starting_at(Corner::from_id(env_cfg.initial_state)).actions;
  Environment env = env_reset(env_cfg);
  llm::HistoryBuffer buf(static_cast<std::size_t>(prompt.n_ht));
  for (int k = 0; k < steps; ++k) {
    const auto& rec = env.step(loop[static_cast<std::size_t>(k) % loop.size()]);
    buf.push({rec.action, llm::transform_displacement(env.reported_displacement(), prompt.x_min)});
  }
  return llm::build_prompt(prompt, buf, llm::summarize(env, prompt));
}

std::string noise_label(double zeta) { return "zeta_" + io::format_double(zeta); }

std::string ablation_label(const std::set<int>& mask) {
  if (mask.empty()) return "full";
  std::string out = "omit";
  for (int s : mask) out += "_S" + std::to_string(s);
  return out;
}

std::string nht_label(int n_ht, Direction d) {
  return "nht_" + std::to_string(n_ht) + (d == Direction::pos_x ? "_pos" : "_neg");
}

std::vector<ConditionRuns> noise_sweep(const std::vector<double>& levels, const EnvConfig& env,
                                       const llm::PromptConfig& prompt, const SweepOptions& opt) {
  std::vector<Condition> conds;
  for (double z : levels) {
    Condition c{noise_label(z), {{kNoiseKeys[0], io::format_double(z)}}, env, prompt};
    c.env.zeta = z;
    conds.push_back(std::move(c));
  }
  return run_conditions(conds, opt);
}

std::vector<ConditionRuns> ablation_study(const std::vector<std::set<int>>& masks, const EnvConfig& env,
                                          const llm::PromptConfig& prompt, const SweepOptions& opt) {
  for (const auto& m : masks) {
    if (m.size() != 1) throw UsageError("each ablation mask must omit exactly one sentence");
    if (*m.begin() < 1 || *m.begin() > llm::kNumSentences)
      throw UsageError("ablation sentence must be S1..S5");
  }
  std::vector<Condition> conds;
  Condition control{ablation_label({}), {{kAblationKeys[0], "none"}}, env, prompt};
  control.prompt.ablation_mask.clear();
  conds.push_back(control);
  for (const auto& m : masks) {
    Condition c{ablation_label(m), {{kAblationKeys[0], "S" + std::to_string(*m.begin())}}, env, prompt};
    c.prompt.ablation_mask = m;
    conds.push_back(std::move(c));
  }
  return run_conditions(conds, opt);
}

std::vector<ConditionRuns> nht_sweep(const std::vector<int>& nhts, const std::vector<Direction>& directions,
                                     const EnvConfig& env, const llm::PromptConfig& prompt,
                                     const SweepOptions& opt) {
  if (nhts.empty() || directions.empty()) throw UsageError("n_ht sweep needs values and directions");
  std::vector<Condition> conds;
  for (Direction d : directions) {
    for (int n : nhts) {
      if (n < 0) throw UsageError("n_ht must be non-negative");
      Condition c{nht_label(n, d), {{kNhtKeys[0], std::string(to_string(d))}, {kNhtKeys[1], std::to_string(n)}}, env,
                  prompt};
      c.env.target = d;
      c.prompt.n_ht = n;
      conds.push_back(std::move(c));
    }
  }
  return run_conditions(conds, opt);
}

namespace {

std::vector<std::string> key_names(const std::vector<ConditionRuns>& results,
                                   const std::vector<std::string>& fallback) {
  std::vector<std::string> names;
  if (results.empty()) return fallback;
    for (const auto& [k, v] : results.front().keys) names.push_back(k);
  return names;
}

std::vector<std::string> key_values(const ConditionRuns& c) {
  std::vector<std::string> out;
  for (const auto& [k, v] : c.keys) out.push_back(v);
  return out;
}

}  // namespace

std::string runs_csv(const std::vector<ConditionRuns>& results, const std::vector<std::string>& key_columns) {
  auto header = key_names(results, key_columns);
  for (const char* h : {"run_id", "seed", "X_final", "success"}) header.emplace_back(h);
  io::CsvWriter csv(header);
  for (const auto& c : results) {
    for (const auto& r : c.runs) {
      auto row = key_values(c);
      row.push_back(std::to_string(r.stats.run_id));
      row.push_back(std::to_string(r.stats.seed));
      row.push_back(io::format_fixed(r.stats.X_final, r.transcript.config.truncation_decimals));
      row.push_back(r.stats.success ? "1" : "0");
      csv.row(row);
    }
  }
  return csv.str();
}

std::string summary_csv(const std::vector<ConditionRuns>& results, const std::vector<std::string>& key_columns) {
  auto header = key_names(results, key_columns);
  for (const char* h : {"runs", "mean_X", "p"}) header.emplace_back(h);
  io::CsvWriter csv(header);
  for (const auto& c : results) {
    auto row = key_values(c);
    row.push_back(std::to_string(c.summary.runs));
    row.push_back(io::format_double(c.summary.mean_X));
    row.push_back(io::format_double(c.summary.p));
    csv.row(row);
  }
  return csv.str();
}

std::string trajectories_csv(const std::vector<ConditionRuns>& results) {
  io::CsvWriter csv({"condition", "run_id", "n", "X"});
  for (const auto& c : results)
    for (const auto& r : c.runs)
      for (const auto& rec : r.transcript.records)
        csv.row({c.condition, std::to_string(r.stats.run_id), std::to_string(rec.n), io::format_double(rec.X)});
  return csv.str();
}

ConditionRuns condition_from_transcripts(std::string condition,
                                         std::vector<std::pair<std::string, std::string>> keys,
                                         const std::vector<Transcript>& transcripts, const SuccessCriterion& c) {
  ConditionRuns cr;
  cr.condition = std::move(condition);
  cr.keys = std::move(keys);
  std::vector<RunStats> stats;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    RunOutput r;
    r.transcript = transcripts[i];
    r.stats = run_stats(r.transcript, static_cast<int>(i), signature_for(r.transcript.config), c);
    r.context.condition = cr.condition;
    r.context.run_id = static_cast<int>(i);
    r.context.env = r.transcript.config;
    stats.push_back(r.stats);
    cr.runs.push_back(std::move(r));
  }
  cr.summary = summarize(stats, transcripts.empty() ? 3 : transcripts.front().config.truncation_decimals);
  return cr;
}

}  // namespace microswim::experiment
