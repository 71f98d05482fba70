#include "adabo/adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "adabo/errors.hpp"

namespace adabo {
namespace {

struct Moments {
  double mean = 0.0;
  double spread = 0.0;  // std under the requested divisor
};

Moments ledger_moments(const std::vector<double>& scores, bool sample_divisor) {
  Moments m;
  const auto n = scores.size();
  if (n == 0) return m;
  for (double v : scores) m.mean += v;
  m.mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : scores) ss += (v - m.mean) * (v - m.mean);
  const double div = sample_divisor ? static_cast<double>(n) - 1.0 : static_cast<double>(n);
  if (div > 0.0) m.spread = std::sqrt(ss / div);
  return m;
}

double floored_reward(double f_new, const Moments& m, double penalty, double epsilon) {
  const double z = m.spread < 1e-12 ? 0.0 : (f_new - m.mean) / m.spread;
  return std::max(epsilon, z - penalty);
}

bool contains(const std::vector<Genome>& genomes, const Genome& g) {
  return std::find(genomes.begin(), genomes.end(), g) != genomes.end();
}

SurrogateKind mutate_surrogate(SurrogateKind cur, RandomSource& rng) {
  static constexpr SurrogateKind kAll[] = {SurrogateKind::GP, SurrogateKind::RF,
                                           SurrogateKind::ET, SurrogateKind::GBRT};
  std::int64_t pick = rng.uniform_int(0, 2);
  for (auto s : kAll) {
    if (s == cur) continue;
    if (pick-- == 0) return s;
  }
  return cur;  // unreachable
}

AcquisitionKind mutate_acquisition(AcquisitionKind cur, RandomSource& rng) {
  static constexpr AcquisitionKind kAll[] = {AcquisitionKind::LCB, AcquisitionKind::EI,
                                             AcquisitionKind::PI, AcquisitionKind::GP_HEDGE};
  std::int64_t pick = rng.uniform_int(0, 2);
  for (auto a : kAll) {
    if (a == cur) continue;
    if (pick-- == 0) return a;
  }
  return cur;  // unreachable
}

void check_distinct(std::span<const Genome> pool) {
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      if (pool[i] == pool[j]) throw ConfigError("pool: genomes must be pairwise distinct");
}

}  // namespace

void validate(const RewardConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon))
    throw ConfigError("reward: epsilon must be a positive finite number");
  if (!(cfg.c >= 0.0) || !std::isfinite(cfg.c))
    throw ConfigError("reward: c must be a non-negative finite number");
  if (!(cfg.b >= 0.0) || !std::isfinite(cfg.b))
    throw ConfigError("reward: b must be a non-negative finite number");
  if (cfg.N < 1) throw ConfigError("reward: N must be >= 1");
  if (cfg.N_s < 1) throw ConfigError("reward: N_s must be >= 1");
}

void validate(const GAConfig& ga, std::size_t pool_size) {
  if (ga.NG < 2) throw ConfigError("ga: NG must be >= 2");
  if (static_cast<std::size_t>(ga.NG) > pool_size)
    throw ConfigError("ga: NG exceeds the pool size");
  if (!(ga.retain_prob >= 0.0 && ga.retain_prob <= 1.0))
    throw ConfigError("ga: retain_prob must lie in [0, 1]");
  if (!(ga.mutate_prob >= 0.0 && ga.mutate_prob <= 1.0))
    throw ConfigError("ga: mutate_prob must lie in [0, 1]");
}

double adjusted_reward(double f_new, const RewardLedger& ledger, int n, const RewardConfig& cfg) {
  if (n < 1) throw ValidationError("adjusted_reward: n must be >= 1");
  const Moments m = ledger_moments(ledger.scores, /*sample_divisor=*/true);
  return floored_reward(f_new, m, cfg.alpha() * n, cfg.epsilon);
}

double adjusted_fitness_parallel(double f_j, const RewardLedger& ledger, int n,
                                 const RewardConfig& cfg) {
  if (n < 1) throw ValidationError("adjusted_fitness_parallel: n must be >= 1");
  const Moments m = ledger_moments(ledger.scores, /*sample_divisor=*/false);
  return floored_reward(f_j, m, cfg.alpha() * n + cfg.b, cfg.epsilon);
}

double update_ledger(RewardLedger& ledger, const Trial& trial, int n, const RewardConfig& cfg) {
  // Larger-is-better sign for the reward statistics.
  const double score = -trial.objective;
  ledger.scores.push_back(score);
  const double reward = cfg.N_s == 1 ? adjusted_reward(score, ledger, n, cfg)
                                     : adjusted_fitness_parallel(score, ledger, n, cfg);
  auto [it, fresh] = ledger.best_reward.try_emplace(trial.genome, reward);
  if (!fresh && reward > it->second) it->second = reward;
  ++ledger.times_scored[trial.genome];
  return reward;
}

std::vector<double> selection_weights(const RewardLedger& ledger, std::span<const Genome> pool,
                                      const RewardConfig& cfg) {
  if (pool.empty()) throw ValidationError("selection_weights: pool must not be empty");
  double sum_best = 0.0;
  int scored = 0;
  for (const auto& g : pool) {
    if (auto it = ledger.best_reward.find(g); it != ledger.best_reward.end()) {
      sum_best += it->second;
      ++scored;
    }
  }
  // Never-scored genomes stand in at the average attained best, so newcomers
  // are neither starved nor privileged.
  const double fill = scored > 0 ? sum_best / scored : cfg.epsilon;
  std::vector<double> w(pool.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto it = ledger.best_reward.find(pool[i]);
    w[i] = std::max(it != ledger.best_reward.end() ? it->second : fill, cfg.epsilon);
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

Genome select_one(const RewardLedger& ledger, std::span<const Genome> pool,
                  const RewardConfig& cfg, RandomSource& rng) {
  const auto w = selection_weights(ledger, pool, cfg);
  return pool[rng.categorical(w)];
}

std::vector<Genome> ga_select(const RewardLedger& ledger, std::span<const Genome> pool,
                              const GAConfig& ga, const RewardConfig& cfg, RandomSource& rng) {
  validate(ga, pool.size());
  check_distinct(pool);
  const int slots = std::max(ga.NG, cfg.N_s);
  if (static_cast<std::size_t>(slots) > pool.size())
    throw ConfigError("ga_select: pool too small to keep children distinct");

  // Parents: weight-proportional, without replacement.
  std::vector<double> w = selection_weights(ledger, pool, cfg);
  std::vector<Genome> parents;
  parents.reserve(static_cast<std::size_t>(ga.NG));
  for (int i = 0; i < ga.NG; ++i) {
    const std::size_t pick = rng.categorical(w);
    parents.push_back(pool[pick]);
    w[pick] = 0.0;
  }

  std::vector<Genome> children;
  children.reserve(static_cast<std::size_t>(slots));
  for (int s = 0; s < slots; ++s) {
    Genome child;
    if (rng.uniform() < ga.retain_prob) {
      child = parents[static_cast<std::size_t>(rng.uniform_int(0, ga.NG - 1))];
    } else {
      // Crossover: two distinct parents; one coin per gene picks its donor.
      const auto i = static_cast<std::size_t>(rng.uniform_int(0, ga.NG - 1));
      auto j = static_cast<std::size_t>(rng.uniform_int(0, ga.NG - 2));
      if (j >= i) ++j;
      const Genome& surr_donor = rng.uniform() < 0.5 ? parents[i] : parents[j];
      const Genome& acq_donor = rng.uniform() < 0.5 ? parents[i] : parents[j];
      child.surrogate = surr_donor.surrogate;
      child.acquisition = acq_donor.acquisition;
      child.params = acq_donor.params;
    }
    if (rng.uniform() < ga.mutate_prob) {
      if (rng.uniform() < 0.5) {
        child.surrogate = mutate_surrogate(child.surrogate, rng);
      } else {
        child.acquisition = mutate_acquisition(child.acquisition, rng);
      }
    }
    children.push_back(child);
  }

  // Duplicates give way to pool members not yet in this round.
  std::vector<Genome> round;
  round.reserve(children.size());
  for (const auto& child : children) {
    if (!contains(round, child)) {
      round.push_back(child);
      continue;
    }
    std::vector<Genome> unused;
    for (const auto& g : pool)
      if (!contains(round, g)) unused.push_back(g);
    round.push_back(unused[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(unused.size()) - 1))]);
  }
  round.resize(static_cast<std::size_t>(cfg.N_s));
  return round;
}

RunResult run_adaptive(const ObjectiveFn& objective, const ParamSpace& space,
                       std::span<const Genome> pool, const RewardConfig& cfg, const GAConfig& ga,
                       const OptimizerConfig& opt_cfg, std::uint64_t seed) {
  validate(cfg);
  if (pool.empty()) throw ConfigError("adaptive: pool must not be empty");
  check_distinct(pool);
  if (pool.size() > 1 && cfg.N_s > 1) validate(ga, pool.size());

  RandomSource prop_rng = RandomSource::derive(seed, kProposalStream);
  RandomSource meta_rng = RandomSource::derive(seed, kSelectionStream);

  // Mutation can produce genomes outside the configured pool; optimizers are
  // created on first use so those children still get served.
  std::map<Genome, BaseOptimizer> optimizers;
  auto opt_for = [&](const Genome& g) -> BaseOptimizer& {
    auto it = optimizers.find(g);
    if (it == optimizers.end())
      it = optimizers.emplace(g, BaseOptimizer(g, space, opt_cfg)).first;
    return it->second;
  };

  TrialHistory history;
  RewardLedger ledger;
  for (int round = 1; round <= cfg.N; ++round) {
    std::vector<Genome> chosen;
    if (pool.size() == 1) {
      chosen.assign(static_cast<std::size_t>(cfg.N_s), pool[0]);
    } else if (cfg.N_s == 1) {
      chosen.push_back(select_one(ledger, pool, cfg, meta_rng));
    } else {
      chosen = ga_select(ledger, pool, ga, cfg, meta_rng);
    }

    // A genome owing several of the round's slots asks once as a batch
    // (constant liar); distinct genomes ask plainly on the shared history.
    std::vector<ProposedPoint> props(chosen.size());
    std::vector<bool> assigned(chosen.size(), false);
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      if (assigned[s]) continue;
      std::vector<std::size_t> slots{s};
      for (std::size_t t = s + 1; t < chosen.size(); ++t)
        if (!assigned[t] && chosen[t] == chosen[s]) slots.push_back(t);
      BaseOptimizer& opt = opt_for(chosen[s]);
      if (slots.size() == 1) {
        props[s] = opt.ask(history, prop_rng);
      } else {
        auto batch = opt.ask_batch(history, static_cast<int>(slots.size()), prop_rng);
        for (std::size_t k = 0; k < slots.size(); ++k) props[slots[k]] = batch[k];
      }
      for (auto t : slots) assigned[t] = true;
    }

    auto outcomes = evaluate_round(objective, props);
    settle_failures(history, outcomes);
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      Trial t;
      t.point = props[s].point;
      t.objective = outcomes[s].objective;
      t.iteration = round;
      t.genome = chosen[s];
      t.slot = static_cast<int>(s);
      t.failed = outcomes[s].failed;
      t.from_init = props[s].from_init;
      t.fallback = props[s].fallback;
      t.wall_ms = outcomes[s].wall_ms;
      opt_for(chosen[s]).tell(history, t);
      // Random proposals (cold start, fit fallback) carry no signal about
      // the proposing genome: their scores join the z baseline but earn no
      // reward, so early selection stays uniform until models speak.
      if (t.failed) continue;
      if (t.from_init) {
        ledger.scores.push_back(-t.objective);
      } else {
        history.trials.back().reward = update_ledger(ledger, t, round, cfg);
      }
    }
  }

  RunResult result;
  result.trials = std::move(history.trials);
  fill_best(result);
  return result;
}

}  // namespace adabo
