#pragma once

#include <map>

#include "adabo/optimizer.hpp"

namespace adabo {

// Constants of the adjusted reward. The iteration penalty alpha = c / N is
// derived on demand, never stored.
struct RewardConfig {
  double epsilon = 0.01;  // floor and cold-start weight
  double c = 1.96;
  double b = 0.1;  // extra penalty in parallel fitness only
  int N = 100;     // round budget, initial design included
  int N_s = 1;     // evaluations per round

  double alpha() const { return c / static_cast<double>(N); }
};

void validate(const RewardConfig& cfg);

// Everything the meta level remembers about past rounds. Scores are stored
// larger-is-better (negated minimization objectives); per-genome entries keep
// only the best adjusted reward each genome ever earned plus how often it
// was scored.
struct RewardLedger {
  std::vector<double> scores;
  std::map<Genome, double> best_reward;
  std::map<Genome, int> times_scored;
};

// z-scores f_new against the ledger, applies the iteration penalty, floors
// at epsilon: max(epsilon, z - alpha * n). The spread uses the n-1 divisor;
// a spread below 1e-12 (too few or constant scores) makes z = 0.
double adjusted_reward(double f_new, const RewardLedger& ledger, int n, const RewardConfig& cfg);

// Round-fitness for parallel suggestion, max(epsilon, z - alpha * n - b),
// where z spreads over all scores with the 1/n (population) divisor.
double adjusted_fitness_parallel(double f_j, const RewardLedger& ledger, int n,
                                 const RewardConfig& cfg);

// Appends the trial's larger-is-better score, computes its reward
// (adjusted_reward when N_s = 1, parallel fitness otherwise), and keeps the
// per-genome historical maximum. Returns the computed reward.
double update_ledger(RewardLedger& ledger, const Trial& trial, int n, const RewardConfig& cfg);

// Per-genome selection probabilities: the genome's best reward, or for
// never-scored genomes the mean of the bests attained so far (epsilon when
// nobody scored); floored at epsilon, then normalized.
std::vector<double> selection_weights(const RewardLedger& ledger, std::span<const Genome> pool,
                                      const RewardConfig& cfg);

Genome select_one(const RewardLedger& ledger, std::span<const Genome> pool,
                  const RewardConfig& cfg, RandomSource& rng);

struct GAConfig {
  int NG = 4;                // parents drawn per round
  double retain_prob = 0.5;  // chance a child is a plain parent copy
  double mutate_prob = 0.1;  // chance a child gets one gene reassigned
};

void validate(const GAConfig& ga, std::size_t pool_size);

// One genetic round: weight-proportional parents, retention or two-donor
// crossover per child, occasional mutation, duplicate children replaced by
// unused pool members. Returns the first N_s children, pairwise distinct.
std::vector<Genome> ga_select(const RewardLedger& ledger, std::span<const Genome> pool,
                              const GAConfig& ga, const RewardConfig& cfg, RandomSource& rng);

// The full meta loop: per round pick genome(s), ask (constant liar covers a
// genome owing several points), evaluate, tell, score the ledger. Random
// proposals (initial design, fit fallback) enter the ledger's score baseline
// but earn no genome reward. A pool of one skips selection entirely and
// reproduces the base optimizer bit for bit.
RunResult run_adaptive(const ObjectiveFn& objective, const ParamSpace& space,
                       std::span<const Genome> pool, const RewardConfig& cfg, const GAConfig& ga,
                       const OptimizerConfig& opt_cfg, std::uint64_t seed);

}  // namespace adabo
