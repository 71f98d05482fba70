#pragma once

#include <cstdint>

#include "adabo/adaptive.hpp"
#include "adabo/objectives.hpp"

namespace adabo {

// Exactly one of builtin/command is set. External commands speak a one-line
// protocol: parameters in, {"objective": <number>} out.
struct ObjectiveBinding {
  std::string builtin;
  std::string command;
  double timeout_s = 600.0;
};

struct RunConfig {
  std::string name = "run";
  ParamSpace space;
  ObjectiveBinding objective;
  bool maximize = false;
  int N = 100;
  int N_s = 1;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  RewardConfig reward;  // N and N_s above are mirrored in before running
  GAConfig ga;
  AcquisitionParams acquisition;  // shared by every pool genome
  std::vector<Genome> pool;       // default: the 16-genome cross
  OptimizerConfig optimizer;
  std::string out_dir = "out";
};

// Parses and fully validates; unknown keys are rejected so typos surface.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Canonical round-trippable form: parse(resolved(cfg)) reproduces cfg.
std::string resolved_config_json(const RunConfig& cfg);

// Stable identity of a run: hash of the resolved config minus the output
// location. Identical configs give identical ids across processes.
std::string run_id(const RunConfig& cfg);

enum class RunScope { All, AdaptiveOnly, BaseOnly };

struct SummaryRow {
  std::string optimizer;
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
  double min = 0.0;
  double median = 0.0;
};

// One log line per evaluation; scores carry the reporting sign (as handed to
// the user), objectives the minimization sign (as seen by the optimizer).
struct TrialLogRecord {
  std::string run;
  std::string optimizer;  // which run produced it: "adaptive" or a genome label
  std::uint64_t seed = 0;
  int round = 1;
  int slot = 0;
  std::string genome;  // the proposing genome
  Point params;
  double score = 0.0;
  double objective = 0.0;
  double reward = std::numeric_limits<double>::quiet_NaN();  // NaN: not ledgered
  bool failed = false;
  bool from_init = false;
  bool fallback = false;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  std::vector<SummaryRow> summary;  // best mean first
  std::vector<TrialLogRecord> log;
};

// Minimization-sign objective closure; throws ConfigError on a bad binding.
ObjectiveFn bind_objective(const RunConfig& cfg);

ExperimentResult run_experiment(const RunConfig& cfg, RunScope scope = RunScope::All);

// Writes summary.csv, summary.json, trials.jsonl, config.json under out_dir.
void emit_outputs(const ExperimentResult& result, const RunConfig& cfg,
                  const std::string& out_dir);

// Per-seed best scores -> one summary row. Seed spread uses the n-1
// divisor; the median averages the two middle values.
SummaryRow summarize(const std::string& label, const std::vector<double>& best_scores);

struct ReplayReport {
  bool ok = true;
  std::vector<std::string> messages;
};

// Recomputes the summary from an emitted trial log and compares it, value
// for value, against the emitted summary.
ReplayReport replay_verify(const std::string& log_path, const std::string& summary_path,
                           const std::string& config_path);

// Subprocess objective call. Throws EvalError on timeout, nonzero exit, or a
// malformed reply; the meta loop records such trials as failed.
double external_objective(const std::string& command, const Point& p, const ParamSpace& space,
                          double timeout_s);

// The request line sent to external commands: dimension names to values,
// integer dimensions serialized without a decimal point.
std::string external_request_line(const Point& p, const ParamSpace& space);

}  // namespace adabo
