#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adabo/harness.hpp"

namespace {

void print_summary(const std::vector<adabo::SummaryRow>& rows) {
  std::size_t width = 9;
  for (const auto& row : rows) width = std::max(width, row.optimizer.size());
  std::printf("%-*s %12s %12s %12s %12s %12s\n", static_cast<int>(width), "optimizer", "mean",
              "std", "max", "min", "median");
  for (const auto& row : rows) {
    std::printf("%-*s %12.6g %12.6g %12.6g %12.6g %12.6g\n", static_cast<int>(width),
                row.optimizer.c_str(), row.mean, row.std, row.max, row.min, row.median);
  }
}

int cmd_run(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
            const std::string& only, const std::string& out_override) {
  adabo::RunConfig cfg = adabo::load_run_config(config_path);
  if (!seeds.empty()) cfg.seeds = seeds;
  if (!out_override.empty()) cfg.out_dir = out_override;
  adabo::RunScope scope = adabo::RunScope::All;
  if (only == "adaptive") scope = adabo::RunScope::AdaptiveOnly;
  if (only == "base") scope = adabo::RunScope::BaseOnly;

  const adabo::ExperimentResult result = adabo::run_experiment(cfg, scope);
  adabo::emit_outputs(result, cfg, cfg.out_dir);
  print_summary(result.summary);
  std::printf("run %s: %zu trials -> %s\n", adabo::run_id(cfg).c_str(), result.log.size(),
              cfg.out_dir.c_str());
  return 0;
}

int cmd_replay(const std::string& log_path, std::string summary_path, std::string config_path) {
  const auto dir = std::filesystem::path(log_path).parent_path();
  if (summary_path.empty()) summary_path = (dir / "summary.json").string();
  if (config_path.empty()) config_path = (dir / "config.json").string();
  const adabo::ReplayReport report = adabo::replay_verify(log_path, summary_path, config_path);
  for (const auto& msg : report.messages)
    std::fprintf(report.ok ? stdout : stderr, "%s\n", msg.c_str());
  return report.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive model-based optimization benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string only = "all";
  std::string out_override;
  auto* run = app.add_subcommand("run", "execute a benchmark described by a JSON config");
  run->add_option("--config", config_path, "path to the run config")->required();
  run->add_option("--seeds", seeds, "override the config's seed list")->delimiter(',');
  run->add_option("--only", only, "which optimizers to run")
      ->check(CLI::IsMember({"all", "adaptive", "base"}));
  run->add_option("--out", out_override, "override the output directory");

  std::string log_path;
  std::string summary_path;
  std::string replay_config;
  auto* replay = app.add_subcommand("replay", "recompute a summary from a trial log");
  replay->add_option("--log", log_path, "path to trials.jsonl")->required();
  replay->add_option("--summary", summary_path, "summary.json (default: next to the log)");
  replay->add_option("--config", replay_config, "config.json (default: next to the log)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_path, seeds, only, out_override);
    return cmd_replay(log_path, summary_path, replay_config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
