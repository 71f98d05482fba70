#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "adabo/errors.hpp"
#include "adabo/harness.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace adabo;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"({
  "name": "small",
  "space": [
    {"name": "x", "kind": "real", "low": -1.0, "high": 1.0},
    {"name": "y", "kind": "real", "low": -1.0, "high": 1.0}
  ],
  "objective": {"builtin": "sphere"},
  "N": 15,
  "seeds": [0, 1],
  "n_init": 8,
  "pool": "surrogates4",
  "out_dir": "unused"
})";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fresh scratch directory per call; removed by the caller.
fs::path scratch_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / (std::string("adabo_") + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing fills defaults and mirrors the budget") {
  const RunConfig cfg = parse_run_config(R"({
    "space": [{"name": "x", "kind": "real", "low": 0, "high": 1}],
    "objective": {"builtin": "sphere"}
  })");
  CHECK(cfg.name == "run");
  CHECK(cfg.N == 100);
  CHECK(cfg.N_s == 1);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(cfg.pool.size() == 16);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.reward.N == 100);
  CHECK(cfg.reward.N_s == 1);
  CHECK_FALSE(cfg.maximize);
  CHECK(cfg.objective.timeout_s == 600.0);
}

TEST_CASE("config parsing rejects malformed input") {
  const char* space_ok = R"("space": [{"name": "x", "kind": "real", "low": 0, "high": 1}])";
  auto wrap = [&](const std::string& extra) {
    return "{" + std::string(space_ok) + R"(, "objective": {"builtin": "sphere"})" + extra + "}";
  };
  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[1,2]"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "typo_key": 3)")), ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "seeds": [])")), ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "pool": "famous5")")), ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "pool": [])")), ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(wrap(
          R"(, "pool": [{"surrogate": "GP", "acquisition": "EI"}, {"surrogate": "GP", "acquisition": "EI"}])")),
      ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "reward": {"epsilon": -1})")), ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "ga": {"NG": 40}, "N_s": 2)")), ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "surrogate": {"forest_trees": 0})")), ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "proposal": {"candidates": 0})")), ConfigError);
  CHECK_THROWS_AS(parse_run_config(wrap(R"(, "acquisition": {"beta": 0})")), ConfigError);

  // Objective binding must be exactly one of builtin / command.
  const char* no_obj = R"({"space": [{"name": "x", "kind": "real", "low": 0, "high": 1}]})";
  CHECK_THROWS_AS(parse_run_config(no_obj), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({
    "space": [{"name": "x", "kind": "real", "low": 0, "high": 1}],
    "objective": {"builtin": "sphere", "command": "cat"}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({
    "space": [{"name": "x", "kind": "real", "low": 0, "high": 1}],
    "objective": {"command": "cat", "timeout_s": 0}
  })"),
                  ConfigError);

  // Builtins check the space shape at parse time.
  CHECK_THROWS_AS(parse_run_config(R"({
    "space": [{"name": "x", "kind": "real", "low": 0, "high": 1}],
    "objective": {"builtin": "branin"}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({
    "space": [{"name": "x", "kind": "real", "low": 0, "high": 1}],
    "objective": {"builtin": "rosenbrock"}
  })"),
                  ConfigError);
}

TEST_CASE("pool specifications") {
  const std::string head = R"({
    "space": [{"name": "x", "kind": "real", "low": 0, "high": 1}],
    "objective": {"builtin": "sphere"},
    "pool": )";
  const RunConfig four = parse_run_config(head + R"("surrogates4"})");
  CHECK(four.pool.size() == 4);
  for (const auto& g : four.pool) CHECK(g.acquisition == AcquisitionKind::GP_HEDGE);

  const RunConfig listed = parse_run_config(
      head + R"([{"surrogate": "GP", "acquisition": "EI"}, {"surrogate": "RF", "acquisition": "gp_hedge"}]})");
  CHECK(listed.pool.size() == 2);
  CHECK(listed.pool[0].label() == "GP_EI");
  CHECK(listed.pool[1].label() == "RF_gp_hedge");

  // Pool genomes inherit the shared acquisition params.
  const RunConfig tuned = parse_run_config(R"({
    "space": [{"name": "x", "kind": "real", "low": 0, "high": 1}],
    "objective": {"builtin": "sphere"},
    "acquisition": {"beta": 3.0},
    "pool": [{"surrogate": "GP", "acquisition": "LCB"}]
  })");
  CHECK(tuned.pool[0].params.beta == 3.0);
}

TEST_CASE("resolved config round-trips and keys the run id") {
  const RunConfig cfg = parse_run_config(kSmallConfig);
  const std::string canon = resolved_config_json(cfg);
  const RunConfig back = parse_run_config(canon);
  CHECK(resolved_config_json(back) == canon);
  CHECK(run_id(back) == run_id(cfg));
  CHECK(run_id(cfg).size() == 16);

  // The id ignores where outputs land but tracks the experiment itself.
  RunConfig moved = cfg;
  moved.out_dir = "elsewhere";
  CHECK(run_id(moved) == run_id(cfg));
  RunConfig larger = cfg;
  larger.N = 16;
  CHECK(run_id(larger) != run_id(cfg));
}

TEST_CASE("summarize computes the summary row statistics") {
  const SummaryRow even = summarize("opt", {4.0, 1.0, 3.0, 2.0});
  CHECK(even.mean == 2.5);
  CHECK(even.std == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  CHECK(even.max == 4.0);
  CHECK(even.min == 1.0);
  CHECK(even.median == 2.5);

  const SummaryRow odd = summarize("opt", {10.0, 1.0, 2.0});
  CHECK(odd.median == 2.0);

  const SummaryRow lone = summarize("opt", {3.0});
  CHECK(lone.std == 0.0);
  CHECK(lone.median == 3.0);
  CHECK_THROWS_AS(summarize("opt", {}), ValidationError);
}

TEST_CASE("experiments account for every run and sort better-first") {
  const RunConfig cfg = parse_run_config(kSmallConfig);
  const ExperimentResult result = run_experiment(cfg);
  CHECK(result.summary.size() == 5);  // adaptive + 4 bases
  CHECK(result.log.size() == 2u * 5u * 15u);

  std::set<std::string> labels;
  for (const auto& row : result.summary) labels.insert(row.optimizer);
  CHECK(labels ==
        std::set<std::string>{"adaptive", "GP_gp_hedge", "RF_gp_hedge", "ET_gp_hedge",
                              "GBRT_gp_hedge"});
  for (std::size_t i = 1; i < result.summary.size(); ++i)
    CHECK(result.summary[i - 1].mean <= result.summary[i].mean);  // minimization
  for (const auto& row : result.summary) {
    CHECK(row.min <= row.median);
    CHECK(row.median <= row.max);
    CHECK(row.std >= 0.0);
  }

  // Scope narrowing.
  CHECK(run_experiment(cfg, RunScope::AdaptiveOnly).summary.size() == 1);
  CHECK(run_experiment(cfg, RunScope::BaseOnly).summary.size() == 4);
}

TEST_CASE("rerunning a config reproduces the experiment bit for bit") {
  const RunConfig cfg = parse_run_config(kSmallConfig);
  const ExperimentResult a = run_experiment(cfg, RunScope::BaseOnly);
  const ExperimentResult b = run_experiment(cfg, RunScope::BaseOnly);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].params.values == b.log[i].params.values);
    CHECK(a.log[i].objective == b.log[i].objective);
  }
  for (std::size_t i = 0; i < a.summary.size(); ++i) {
    CHECK(a.summary[i].optimizer == b.summary[i].optimizer);
    CHECK(a.summary[i].mean == b.summary[i].mean);
    CHECK(a.summary[i].std == b.summary[i].std);
  }
}

TEST_CASE("maximize flips the reported sign and the best picks the max score") {
  RunConfig cfg = parse_run_config(kSmallConfig);
  cfg.maximize = true;
  cfg.seeds = {3};
  const ExperimentResult result = run_experiment(cfg, RunScope::AdaptiveOnly);
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& rec : result.log) {
    CHECK(rec.score == -rec.objective);
    if (!rec.failed) best_score = std::max(best_score, rec.score);
  }
  REQUIRE(result.summary.size() == 1);
  CHECK(result.summary[0].mean == best_score);  // single seed: mean is that best
  CHECK(result.summary[0].max == best_score);
}

TEST_CASE("emitted files parse back losslessly and replay clean") {
  RunConfig cfg = parse_run_config(kSmallConfig);
  const fs::path dir = scratch_dir("emit");
  cfg.out_dir = dir.string();
  const ExperimentResult result = run_experiment(cfg);
  emit_outputs(result, cfg, cfg.out_dir);

  // Header and exact double round-trip of the csv.
  std::istringstream csv(read_file(dir / "summary.csv"));
  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line == "optimizer,mean,std,max,min,median");
  for (const auto& row : result.summary) {
    REQUIRE(std::getline(csv, line));
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    CHECK(cell == row.optimizer);
    const double want[] = {row.mean, row.std, row.max, row.min, row.median};
    for (double w : want) {
      REQUIRE(std::getline(fields, cell, ','));
      CHECK(std::strtod(cell.c_str(), nullptr) == w);
    }
  }

  // Log lines carry the run id and full per-trial schema.
  std::istringstream log(read_file(dir / "trials.jsonl"));
  std::size_t lines = 0;
  const std::string id = run_id(cfg);
  while (std::getline(log, line)) {
    const auto rec = nlohmann::json::parse(line);
    CHECK(rec.at("run") == id);
    CHECK(rec.at("params").size() == 2);
    CHECK(rec.at("round").get<int>() >= 1);
    ++lines;
  }
  CHECK(lines == result.log.size());

  // The emitted config reproduces the run identity.
  CHECK(run_id(load_run_config((dir / "config.json").string())) == id);

  const ReplayReport ok = replay_verify((dir / "trials.jsonl").string(),
                                        (dir / "summary.json").string(),
                                        (dir / "config.json").string());
  CHECK(ok.ok);

  // A nudged summary value must be caught.
  auto jsum = nlohmann::json::parse(read_file(dir / "summary.json"));
  jsum[0]["mean"] = jsum[0]["mean"].get<double>() + 1e-9;
  std::ofstream(dir / "summary.json") << jsum.dump(2) << "\n";
  const ReplayReport bad = replay_verify((dir / "trials.jsonl").string(),
                                         (dir / "summary.json").string(),
                                         (dir / "config.json").string());
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.messages.empty());
  fs::remove_all(dir);
}

TEST_CASE("integer parameters serialize without a decimal point") {
  ParamSpace space({{"trees", DimKind::Integer, 1, 100}, {"rate", DimKind::Real, 0.0, 1.0}});
  const std::string line = external_request_line({{52.0, 0.55}}, space);
  CHECK(line == R"({"trees":52,"rate":0.55})");
}

TEST_CASE("external objective speaks the one-line protocol") {
  ParamSpace space({{"x", DimKind::Real, 0.0, 1.0}});
  const Point p{{0.25}};
  CHECK(external_objective("read line; echo '{\"objective\": 0.5}'", p, space, 5.0) == 0.5);

  // The reply may depend on the request payload.
  const double doubled = external_objective(
      "python3 -c 'import json,sys; d=json.loads(sys.stdin.readline()); "
      "print(json.dumps({\"objective\": d[\"x\"] * 2}))'",
      p, space, 10.0);
  CHECK(doubled == 0.5);

  CHECK_THROWS_AS(external_objective("echo not-json", p, space, 5.0), EvalError);
  CHECK_THROWS_AS(external_objective("echo '{\"objective\": \"oops\"}'", p, space, 5.0),
                  EvalError);
  CHECK_THROWS_AS(external_objective("exit 3", p, space, 5.0), EvalError);
  CHECK_THROWS_AS(external_objective("sleep 30", p, space, 0.2), EvalError);
}

TEST_CASE("a failing external command is tolerated as trial failures") {
  RunConfig cfg = parse_run_config(R"({
    "space": [{"name": "x", "kind": "real", "low": 0, "high": 1}],
    "objective": {"command": "exit 1", "timeout_s": 5},
    "N": 3,
    "seeds": [0],
    "n_init": 2,
    "pool": [{"surrogate": "RF", "acquisition": "LCB"}]
  })");
  const ExperimentResult result = run_experiment(cfg, RunScope::BaseOnly);
  CHECK(result.log.size() == 3);
  for (const auto& rec : result.log) {
    CHECK(rec.failed);
    CHECK(rec.objective == 0.0);  // nothing ever succeeded: settled to 0
  }
}

TEST_CASE("builtin objectives hit their published minima") {
  CHECK(sphere({{0.0, 0.0, 0.0}}) == 0.0);
  CHECK(sphere({{1.0, 2.0}}) == 5.0);

  CHECK(branin({{M_PI, 2.275}}) == doctest::Approx(0.397887).epsilon(1e-5));
  CHECK(branin({{-M_PI, 12.275}}) == doctest::Approx(0.397887).epsilon(1e-5));
  CHECK(branin({{9.42478, 2.475}}) == doctest::Approx(0.397887).epsilon(1e-5));

  const Point h6_min{{0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573}};
  CHECK(hartmann6(h6_min) == doctest::Approx(-3.32237).epsilon(1e-4));

  const ParamSpace mixed = mixed_demo_space();
  CHECK(mixed_int_demo({{52.0, 34.0, 67.0, 0.55, 0.325}}, mixed) <= 1e-30);

  CHECK(is_builtin_objective("sphere"));
  CHECK_FALSE(is_builtin_objective("rastrigin"));
  CHECK_THROWS_AS(builtin_objective("rastrigin", {{0.0}}, branin_space()), ConfigError);
}

TEST_CASE("builtin spaces have the conventional shapes") {
  const ParamSpace b = branin_space();
  REQUIRE(b.size() == 2);
  CHECK(b.dim(0).low == -5.0);
  CHECK(b.dim(0).high == 10.0);
  CHECK(b.dim(1).low == 0.0);
  CHECK(b.dim(1).high == 15.0);

  CHECK(hartmann6_space().size() == 6);

  const ParamSpace m = mixed_demo_space();
  REQUIRE(m.size() == 5);
  for (int i = 0; i < 3; ++i) CHECK(m.dim(i).kind == DimKind::Integer);
  for (int i = 3; i < 5; ++i) CHECK(m.dim(i).kind == DimKind::Real);

  CHECK_NOTHROW(check_builtin_space("branin", b));
  CHECK_THROWS_AS(check_builtin_space("branin", hartmann6_space()), ConfigError);
  CHECK_THROWS_AS(check_builtin_space("hartmann6", b), ConfigError);
  CHECK_THROWS_AS(check_builtin_space("mixed_int_demo", b), ConfigError);
}

TEST_CASE("objective binding negates scores under maximize") {
  RunConfig cfg = parse_run_config(kSmallConfig);
  const ObjectiveFn plain = bind_objective(cfg);
  cfg.maximize = true;
  const ObjectiveFn flipped = bind_objective(cfg);
  const Point p{{0.5, -0.25}};
  CHECK(plain(p) == doctest::Approx(0.3125));
  CHECK(flipped(p) == -plain(p));
}
