#pragma once

#include <functional>
#include <limits>
#include <tuple>

#include "adabo/acquisition.hpp"
#include "adabo/space.hpp"
#include "adabo/surrogate.hpp"

namespace adabo {

// Identity of one base optimizer: which surrogate proposes, which acquisition
// scores. The 4 x 4 cross gives the 16-member pool.
struct Genome {
  SurrogateKind surrogate = SurrogateKind::GP;
  AcquisitionKind acquisition = AcquisitionKind::GP_HEDGE;
  AcquisitionParams params;

  bool operator==(const Genome& o) const {
    return surrogate == o.surrogate && acquisition == o.acquisition &&
           params.beta == o.params.beta && params.xi == o.params.xi &&
           params.hedge_eta == o.params.hedge_eta;
  }
  // Orders genomes so they can key maps; no semantic meaning.
  bool operator<(const Genome& o) const {
    return std::tie(surrogate, acquisition, params.beta, params.xi, params.hedge_eta) <
           std::tie(o.surrogate, o.acquisition, o.params.beta, o.params.xi, o.params.hedge_eta);
  }

  std::string label() const;  // e.g. "GP_LCB", "ET_gp_hedge"
};

// All 16 surrogate x acquisition combinations with shared params.
std::vector<Genome> cross_pool(const AcquisitionParams& params = {});

// One completed evaluation. objective carries the minimization sign.
struct Trial {
  Point point;
  double objective = 0.0;
  int iteration = 1;  // meta round, starting at 1
  Genome genome;      // the proposer
  int slot = 0;       // position within the round, 0..N_s-1
  bool failed = false;
  bool from_init = false;  // random proposal (cold start or fit fallback)
  bool fallback = false;   // random proposal forced by a failed fit
  double reward = std::numeric_limits<double>::quiet_NaN();  // set by the meta loop
  double wall_ms = 0.0;
};

// Shared global record: every optimizer fits on all trials, whoever proposed.
struct TrialHistory {
  std::vector<Trial> trials;

  std::size_t size() const { return trials.size(); }
  bool empty() const { return trials.empty(); }
  // Minimum objective over non-failed trials; +inf when there is none.
  double best_objective() const;
  Dataset to_dataset(const ParamSpace& space) const;
};

struct OptimizerConfig {
  int n_init = 0;  // 0 resolves to max(10, 2 * dims)
  SurrogateConfig surrogate;
  ProposalConfig proposal;
};

int resolve_n_init(const OptimizerConfig& cfg, std::size_t dims);

struct ProposedPoint {
  Point point;
  bool from_init = false;
  bool fallback = false;
};

// Ask/tell lifecycle of one genome over an externally owned history.
class BaseOptimizer {
 public:
  BaseOptimizer(Genome genome, ParamSpace space, OptimizerConfig cfg);

  const Genome& genome() const { return genome_; }
  const HedgeState& hedge() const { return hedge_; }

  // Random point while |history| < n_init; otherwise fit on the full history
  // and minimize the acquisition. A failed fit degrades to a random point
  // with the fallback flag set.
  ProposedPoint ask(const TrialHistory& history, RandomSource& rng);

  // Constant-liar batch: between asks, pretends each proposal scored the
  // best (minimum) objective seen so far, on a scratch copy only.
  std::vector<ProposedPoint> ask_batch(const TrialHistory& history, int n_points,
                                       RandomSource& rng);

  // Appends to the shared history; settles the hedge gain when this genome
  // proposed the point through gp_hedge.
  void tell(TrialHistory& history, const Trial& trial);

 private:
  struct PendingHedge {
    Point point;
    AcquisitionKind arm;
    double mean;
  };

  Genome genome_;
  ParamSpace space_;
  OptimizerConfig cfg_;
  int n_init_;
  HedgeState hedge_;
  std::vector<PendingHedge> pending_;
};

// Minimization-sign objective; throwing marks the trial failed.
using ObjectiveFn = std::function<double(const Point&)>;

// Outcome of one objective call.
struct EvalOutcome {
  double objective = 0.0;
  bool failed = false;
  double wall_ms = 0.0;
};

// Evaluates a round's proposals, concurrently when there is more than one;
// results come back in slot order regardless of completion order.
std::vector<EvalOutcome> evaluate_round(const ObjectiveFn& objective,
                                        const std::vector<ProposedPoint>& proposals);

// Replaces failed outcomes with the worst objective seen anywhere (0.0 when
// nothing succeeded yet), so they can enter the shared history.
void settle_failures(const TrialHistory& history, std::vector<EvalOutcome>& outcomes);

// Stream ids hung off the master seed. Proposal draws and meta-level
// selection draws must not interleave, or a portfolio of one would diverge
// from the standalone optimizer.
inline constexpr std::uint64_t kProposalStream = 1;
inline constexpr std::uint64_t kSelectionStream = 2;

struct RunResult {
  std::vector<Trial> trials;
  Point best_point;
  double best_objective = std::numeric_limits<double>::infinity();
};

// Finds best point/objective over non-failed trials.
void fill_best(RunResult& result);

// One base optimizer for N rounds of N_s evaluations under a fixed seed.
RunResult run_single(const Genome& genome, const ParamSpace& space, const ObjectiveFn& objective,
                     int N, int N_s, std::uint64_t seed, const OptimizerConfig& cfg);

}  // namespace adabo
