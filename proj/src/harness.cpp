#include "adabo/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adabo/errors.hpp"
#include "json.hpp"

namespace adabo {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

DimKind kind_from_string(const std::string& s) {
  if (s == "integer" || s == "int") return DimKind::Integer;
  if (s == "real" || s == "float") return DimKind::Real;
  throw ConfigError("config: dimension kind must be 'integer' or 'real', got '" + s + "'");
}

ParamSpace parse_space(const json& arr) {
  if (!arr.is_array() || arr.empty())
    throw ConfigError("config: 'space' must be a non-empty array");
  std::vector<Dimension> dims;
  for (const auto& d : arr) {
    check_keys(d, {"name", "kind", "low", "high"}, "space dimension");
    dims.push_back({d.at("name").get<std::string>(), kind_from_string(d.at("kind")),
                    d.at("low").get<double>(), d.at("high").get<double>()});
  }
  return ParamSpace(std::move(dims));
}

std::vector<Genome> parse_pool(const json& p, const AcquisitionParams& params) {
  if (p.is_string()) {
    const std::string name = p.get<std::string>();
    if (name == "cross16") return cross_pool(params);
    if (name == "surrogates4") {
      std::vector<Genome> pool;
      for (auto s :
           {SurrogateKind::GP, SurrogateKind::RF, SurrogateKind::ET, SurrogateKind::GBRT})
        pool.push_back({s, AcquisitionKind::GP_HEDGE, params});
      return pool;
    }
    throw ConfigError("config: pool preset must be 'cross16' or 'surrogates4', got '" + name +
                      "'");
  }
  if (!p.is_array() || p.empty())
    throw ConfigError("config: 'pool' must be a preset name or a non-empty array");
  std::vector<Genome> pool;
  for (const auto& g : p) {
    check_keys(g, {"surrogate", "acquisition"}, "pool entry");
    pool.push_back({surrogate_from_string(g.at("surrogate").get<std::string>()),
                    acquisition_from_string(g.at("acquisition").get<std::string>()), params});
  }
  return pool;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ordered_json resolved_config(const RunConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  j["space"] = ordered_json::array();
  for (const auto& d : cfg.space.dims()) {
    j["space"].push_back({{"name", d.name},
                          {"kind", d.kind == DimKind::Integer ? "integer" : "real"},
                          {"low", d.low},
                          {"high", d.high}});
  }
  if (!cfg.objective.builtin.empty()) {
    j["objective"] = {{"builtin", cfg.objective.builtin}};
  } else {
    j["objective"] = {{"command", cfg.objective.command},
                      {"timeout_s", cfg.objective.timeout_s}};
  }
  j["maximize"] = cfg.maximize;
  j["N"] = cfg.N;
  j["N_s"] = cfg.N_s;
  j["seeds"] = cfg.seeds;
  j["n_init"] = cfg.optimizer.n_init;
  j["acquisition"] = {{"beta", cfg.acquisition.beta},
                      {"xi", cfg.acquisition.xi},
                      {"hedge_eta", cfg.acquisition.hedge_eta}};
  j["proposal"] = {{"candidates", cfg.optimizer.proposal.candidates},
                   {"refine_steps", cfg.optimizer.proposal.refine_steps},
                   {"refine_scale", cfg.optimizer.proposal.refine_scale}};
  j["surrogate"] = {{"forest_trees", cfg.optimizer.surrogate.forest_trees},
                    {"forest_std_floor", cfg.optimizer.surrogate.forest_std_floor},
                    {"gp_restarts", cfg.optimizer.surrogate.gp_restarts},
                    {"gp_noise", cfg.optimizer.surrogate.gp_noise},
                    {"gbrt_stages", cfg.optimizer.surrogate.gbrt_stages},
                    {"gbrt_learning_rate", cfg.optimizer.surrogate.gbrt_learning_rate},
                    {"gbrt_max_depth", cfg.optimizer.surrogate.gbrt_max_depth}};
  j["reward"] = {{"epsilon", cfg.reward.epsilon}, {"c", cfg.reward.c}, {"b", cfg.reward.b}};
  j["ga"] = {{"NG", cfg.ga.NG},
             {"retain_prob", cfg.ga.retain_prob},
             {"mutate_prob", cfg.ga.mutate_prob}};
  j["pool"] = ordered_json::array();
  for (const auto& g : cfg.pool)
    j["pool"].push_back(
        {{"surrogate", to_string(g.surrogate)}, {"acquisition", to_string(g.acquisition)}});
  j["out_dir"] = cfg.out_dir;
  return j;
}

// Per-run best in minimization sign: the best non-failed objective, falling
// back to the settled objectives when every evaluation failed.
double best_objective_of(const std::vector<double>& objectives,
                         const std::vector<bool>& failed) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < objectives.size(); ++i)
    if (!failed[i] && objectives[i] < best) best = objectives[i];
  if (!std::isfinite(best))
    for (double v : objectives) best = std::min(best, v);
  return best;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out.good()) throw ConfigError("cannot write '" + path.string() + "'");
}

ordered_json record_to_json(const TrialLogRecord& rec, const ParamSpace& space) {
  ordered_json j;
  j["run"] = rec.run;
  j["optimizer"] = rec.optimizer;
  j["seed"] = rec.seed;
  j["round"] = rec.round;
  j["slot"] = rec.slot;
  j["genome"] = rec.genome;
  ordered_json params;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Dimension& d = space.dim(i);
    if (d.kind == DimKind::Integer) {
      params[d.name] = static_cast<long long>(std::llround(rec.params.values[i]));
    } else {
      params[d.name] = rec.params.values[i];
    }
  }
  j["params"] = std::move(params);
  j["score"] = rec.score;
  j["objective"] = rec.objective;
  if (std::isnan(rec.reward)) {
    j["reward"] = nullptr;
  } else {
    j["reward"] = rec.reward;
  }
  j["failed"] = rec.failed;
  j["init"] = rec.from_init;
  j["fallback"] = rec.fallback;
  j["wall_ms"] = rec.wall_ms;
  return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    check_keys(j,
               {"name", "space", "objective", "maximize", "N", "N_s", "seeds", "n_init",
                "acquisition", "proposal", "surrogate", "reward", "ga", "pool", "out_dir"},
               "the top level");
    RunConfig cfg;
    cfg.name = j.value("name", std::string("run"));
    if (!j.contains("space")) throw ConfigError("config: 'space' is required");
    cfg.space = parse_space(j.at("space"));
    if (!j.contains("objective")) throw ConfigError("config: 'objective' is required");
    {
      const json& o = j.at("objective");
      check_keys(o, {"builtin", "command", "timeout_s"}, "objective");
      cfg.objective.builtin = o.value("builtin", std::string());
      cfg.objective.command = o.value("command", std::string());
      cfg.objective.timeout_s = o.value("timeout_s", 600.0);
      const bool has_builtin = !cfg.objective.builtin.empty();
      const bool has_command = !cfg.objective.command.empty();
      if (has_builtin == has_command)
        throw ConfigError("config: objective needs exactly one of 'builtin' or 'command'");
      if (has_builtin) check_builtin_space(cfg.objective.builtin, cfg.space);
      if (!(cfg.objective.timeout_s > 0.0))
        throw ConfigError("config: objective timeout_s must be positive");
    }
    cfg.maximize = j.value("maximize", false);
    cfg.N = j.value("N", 100);
    cfg.N_s = j.value("N_s", 1);
    if (j.contains("seeds")) {
      cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
      if (cfg.seeds.empty()) throw ConfigError("config: 'seeds' must not be empty");
    }
    cfg.optimizer.n_init = j.value("n_init", 0);
    if (cfg.optimizer.n_init < 0) throw ConfigError("config: n_init must be >= 0");
    if (j.contains("acquisition")) {
      const json& a = j.at("acquisition");
      check_keys(a, {"beta", "xi", "hedge_eta"}, "acquisition");
      cfg.acquisition.beta = a.value("beta", cfg.acquisition.beta);
      cfg.acquisition.xi = a.value("xi", cfg.acquisition.xi);
      cfg.acquisition.hedge_eta = a.value("hedge_eta", cfg.acquisition.hedge_eta);
    }
    validate(cfg.acquisition);
    if (j.contains("proposal")) {
      const json& p = j.at("proposal");
      check_keys(p, {"candidates", "refine_steps", "refine_scale"}, "proposal");
      auto& prop = cfg.optimizer.proposal;
      prop.candidates = p.value("candidates", prop.candidates);
      prop.refine_steps = p.value("refine_steps", prop.refine_steps);
      prop.refine_scale = p.value("refine_scale", prop.refine_scale);
      if (prop.candidates < 1) throw ConfigError("config: proposal candidates must be >= 1");
      if (prop.refine_steps < 0) throw ConfigError("config: refine_steps must be >= 0");
      if (!(prop.refine_scale > 0.0)) throw ConfigError("config: refine_scale must be positive");
    }
    if (j.contains("surrogate")) {
      const json& s = j.at("surrogate");
      check_keys(s,
                 {"forest_trees", "forest_std_floor", "gp_restarts", "gp_noise", "gbrt_stages",
                  "gbrt_learning_rate", "gbrt_max_depth"},
                 "surrogate");
      auto& sc = cfg.optimizer.surrogate;
      sc.forest_trees = s.value("forest_trees", sc.forest_trees);
      sc.forest_std_floor = s.value("forest_std_floor", sc.forest_std_floor);
      sc.gp_restarts = s.value("gp_restarts", sc.gp_restarts);
      sc.gp_noise = s.value("gp_noise", sc.gp_noise);
      sc.gbrt_stages = s.value("gbrt_stages", sc.gbrt_stages);
      sc.gbrt_learning_rate = s.value("gbrt_learning_rate", sc.gbrt_learning_rate);
      sc.gbrt_max_depth = s.value("gbrt_max_depth", sc.gbrt_max_depth);
      if (sc.forest_trees < 1) throw ConfigError("config: forest_trees must be >= 1");
      if (sc.forest_std_floor < 0.0)
        throw ConfigError("config: forest_std_floor must be >= 0");
      if (sc.gp_restarts < 1) throw ConfigError("config: gp_restarts must be >= 1");
      if (sc.gp_noise < 0.0) throw ConfigError("config: gp_noise must be >= 0");
      if (sc.gbrt_stages < 1) throw ConfigError("config: gbrt_stages must be >= 1");
      if (!(sc.gbrt_learning_rate > 0.0))
        throw ConfigError("config: gbrt_learning_rate must be positive");
      if (sc.gbrt_max_depth < 1) throw ConfigError("config: gbrt_max_depth must be >= 1");
    }
    if (j.contains("reward")) {
      const json& r = j.at("reward");
      check_keys(r, {"epsilon", "c", "b"}, "reward");
      cfg.reward.epsilon = r.value("epsilon", cfg.reward.epsilon);
      cfg.reward.c = r.value("c", cfg.reward.c);
      cfg.reward.b = r.value("b", cfg.reward.b);
    }
    if (j.contains("ga")) {
      const json& g = j.at("ga");
      check_keys(g, {"NG", "retain_prob", "mutate_prob"}, "ga");
      cfg.ga.NG = g.value("NG", cfg.ga.NG);
      cfg.ga.retain_prob = g.value("retain_prob", cfg.ga.retain_prob);
      cfg.ga.mutate_prob = g.value("mutate_prob", cfg.ga.mutate_prob);
    }
    cfg.pool = j.contains("pool") ? parse_pool(j.at("pool"), cfg.acquisition)
                                  : cross_pool(cfg.acquisition);
    cfg.out_dir = j.value("out_dir", std::string("out"));

    cfg.reward.N = cfg.N;
    cfg.reward.N_s = cfg.N_s;
    validate(cfg.reward);
    for (std::size_t i = 0; i < cfg.pool.size(); ++i)
      for (std::size_t k = i + 1; k < cfg.pool.size(); ++k)
        if (cfg.pool[i] == cfg.pool[k])
          throw ConfigError("config: pool genomes must be pairwise distinct");
    if (cfg.N_s > 1 && cfg.pool.size() > 1) validate(cfg.ga, cfg.pool.size());
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ValidationError& e) {
    // Range checks shared with the library surface as config errors here.
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string resolved_config_json(const RunConfig& cfg) {
  return resolved_config(cfg).dump(2) + "\n";
}

std::string run_id(const RunConfig& cfg) {
  ordered_json j = resolved_config(cfg);
  j.erase("out_dir");  // relocating outputs does not change the run identity
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

ObjectiveFn bind_objective(const RunConfig& cfg) {
  const bool has_builtin = !cfg.objective.builtin.empty();
  const bool has_command = !cfg.objective.command.empty();
  if (has_builtin == has_command)
    throw ConfigError("objective: exactly one of builtin/command must be set");
  const bool negate = cfg.maximize;
  const ParamSpace space = cfg.space;
  if (has_builtin) {
    check_builtin_space(cfg.objective.builtin, space);
    const std::string name = cfg.objective.builtin;
    return [name, space, negate](const Point& p) {
      const double raw = builtin_objective(name, p, space);
      return negate ? -raw : raw;
    };
  }
  const std::string command = cfg.objective.command;
  const double timeout = cfg.objective.timeout_s;
  return [command, space, negate, timeout](const Point& p) {
    const double raw = external_objective(command, p, space, timeout);
    return negate ? -raw : raw;
  };
}

SummaryRow summarize(const std::string& label, const std::vector<double>& best_scores) {
  if (best_scores.empty()) throw ValidationError("summarize: no scores");
  SummaryRow row;
  row.optimizer = label;
  const double n = static_cast<double>(best_scores.size());
  double sum = 0.0;
  for (double v : best_scores) sum += v;
  row.mean = sum / n;
  double ss = 0.0;
  for (double v : best_scores) ss += (v - row.mean) * (v - row.mean);
  row.std = best_scores.size() < 2 ? 0.0 : std::sqrt(ss / (n - 1.0));
  row.max = *std::max_element(best_scores.begin(), best_scores.end());
  row.min = *std::min_element(best_scores.begin(), best_scores.end());
  std::vector<double> sorted = best_scores;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  row.median = sorted.size() % 2 == 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
  return row;
}

ExperimentResult run_experiment(const RunConfig& cfg, RunScope scope) {
  const ObjectiveFn objective = bind_objective(cfg);
  const std::string id = run_id(cfg);
  RewardConfig reward = cfg.reward;
  reward.N = cfg.N;
  reward.N_s = cfg.N_s;

  struct Entry {
    std::string label;
    bool adaptive;
    Genome genome;
  };
  std::vector<Entry> entries;
  if (scope != RunScope::BaseOnly) entries.push_back({"adaptive", true, {}});
  if (scope != RunScope::AdaptiveOnly)
    for (const auto& g : cfg.pool) entries.push_back({g.label(), false, g});

  ExperimentResult result;
  for (const auto& entry : entries) {
    std::vector<double> bests;
    bests.reserve(cfg.seeds.size());
    for (const std::uint64_t seed : cfg.seeds) {
      const RunResult run =
          entry.adaptive
              ? run_adaptive(objective, cfg.space, cfg.pool, reward, cfg.ga, cfg.optimizer, seed)
              : run_single(entry.genome, cfg.space, objective, cfg.N, cfg.N_s, seed,
                           cfg.optimizer);
      std::vector<double> objectives;
      std::vector<bool> failed;
      for (const auto& t : run.trials) {
        TrialLogRecord rec;
        rec.run = id;
        rec.optimizer = entry.label;
        rec.seed = seed;
        rec.round = t.iteration;
        rec.slot = t.slot;
        rec.genome = t.genome.label();
        rec.params = t.point;
        rec.objective = t.objective;
        rec.score = cfg.maximize ? -t.objective : t.objective;
        rec.reward = t.reward;
        rec.failed = t.failed;
        rec.from_init = t.from_init;
        rec.fallback = t.fallback;
        rec.wall_ms = t.wall_ms;
        result.log.push_back(std::move(rec));
        objectives.push_back(t.objective);
        failed.push_back(t.failed);
      }
      const double best_obj = best_objective_of(objectives, failed);
      bests.push_back(cfg.maximize ? -best_obj : best_obj);
    }
    result.summary.push_back(summarize(entry.label, bests));
  }

  // Leaderboard order: the best mean leads the table.
  std::stable_sort(result.summary.begin(), result.summary.end(),
                   [&](const SummaryRow& a, const SummaryRow& b) {
                     if (a.mean != b.mean) return cfg.maximize ? a.mean > b.mean : a.mean < b.mean;
                     return a.optimizer < b.optimizer;
                   });
  return result;
}

void emit_outputs(const ExperimentResult& result, const RunConfig& cfg,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());

  std::string csv = "optimizer,mean,std,max,min,median\n";
  for (const auto& row : result.summary) {
    csv += row.optimizer + "," + fmt_double(row.mean) + "," + fmt_double(row.std) + "," +
           fmt_double(row.max) + "," + fmt_double(row.min) + "," + fmt_double(row.median) + "\n";
  }
  write_file(fs::path(out_dir) / "summary.csv", csv);

  ordered_json jsum = ordered_json::array();
  for (const auto& row : result.summary) {
    jsum.push_back({{"optimizer", row.optimizer},
                    {"mean", row.mean},
                    {"std", row.std},
                    {"max", row.max},
                    {"min", row.min},
                    {"median", row.median}});
  }
  write_file(fs::path(out_dir) / "summary.json", jsum.dump(2) + "\n");

  std::string log;
  for (const auto& rec : result.log) log += record_to_json(rec, cfg.space).dump() + "\n";
  write_file(fs::path(out_dir) / "trials.jsonl", log);

  write_file(fs::path(out_dir) / "config.json", resolved_config_json(cfg));
}

ReplayReport replay_verify(const std::string& log_path, const std::string& summary_path,
                           const std::string& config_path) {
  ReplayReport report;
  const RunConfig cfg = load_run_config(config_path);
  const std::string id = run_id(cfg);

  std::ifstream in(log_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open log '" + log_path + "'");

  // (optimizer, seed) -> per-trial outcomes, kept in file order.
  std::vector<std::string> label_order;
  std::map<std::string, std::vector<std::uint64_t>> seed_order;
  std::map<std::string, std::map<std::uint64_t, std::pair<std::vector<double>, std::vector<bool>>>>
      runs;
  std::string line;
  std::size_t lineno = 0;
  bool id_ok = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("log line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
    const auto label = rec.at("optimizer").get<std::string>();
    const auto seed = rec.at("seed").get<std::uint64_t>();
    if (id_ok && rec.at("run").get<std::string>() != id) {
      report.ok = false;
      report.messages.push_back("run id in log does not match the config hash");
      id_ok = false;
    }
    if (runs.find(label) == runs.end()) label_order.push_back(label);
    auto& per_seed = runs[label];
    if (per_seed.find(seed) == per_seed.end()) seed_order[label].push_back(seed);
    auto& [objectives, failed] = per_seed[seed];
    objectives.push_back(rec.at("objective").get<double>());
    failed.push_back(rec.at("failed").get<bool>());
  }

  std::map<std::string, SummaryRow> recomputed;
  for (const auto& label : label_order) {
    std::vector<double> bests;
    for (const std::uint64_t seed : seed_order[label]) {
      const auto& [objectives, failed] = runs[label][seed];
      const double best_obj = best_objective_of(objectives, failed);
      bests.push_back(cfg.maximize ? -best_obj : best_obj);
    }
    recomputed[label] = summarize(label, bests);
  }

  std::ifstream sum_in(summary_path, std::ios::binary);
  if (!sum_in) throw ConfigError("cannot open summary '" + summary_path + "'");
  json jsum;
  try {
    jsum = json::parse(sum_in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("summary: invalid JSON: ") + e.what());
  }
  if (!jsum.is_array()) throw ConfigError("summary: expected an array of rows");
  std::size_t matched = 0;
  for (const auto& row : jsum) {
    const auto label = row.at("optimizer").get<std::string>();
    const auto it = recomputed.find(label);
    if (it == recomputed.end()) {
      report.ok = false;
      report.messages.push_back("summary row '" + label + "' has no trials in the log");
      continue;
    }
    ++matched;
    const SummaryRow& mine = it->second;
    auto check = [&](const char* fieldname, double expected, double actual) {
      if (expected != actual) {
        report.ok = false;
        report.messages.push_back("row '" + label + "' " + fieldname + ": summary has " +
                                  fmt_double(expected) + ", log recomputes to " +
                                  fmt_double(actual));
      }
    };
    check("mean", row.at("mean").get<double>(), mine.mean);
    check("std", row.at("std").get<double>(), mine.std);
    check("max", row.at("max").get<double>(), mine.max);
    check("min", row.at("min").get<double>(), mine.min);
    check("median", row.at("median").get<double>(), mine.median);
  }
  if (matched != recomputed.size()) {
    report.ok = false;
    report.messages.push_back("log contains optimizers missing from the summary");
  }
  if (report.ok)
    report.messages.push_back("summary verified: " + std::to_string(matched) + " rows, " +
                              std::to_string(lineno) + " log lines");
  return report;
}

}  // namespace adabo
