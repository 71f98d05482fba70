#include "adabo/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <future>

#include "adabo/errors.hpp"

namespace adabo {

std::string Genome::label() const {
  return std::string(to_string(surrogate)) + "_" + to_string(acquisition);
}

std::vector<Genome> cross_pool(const AcquisitionParams& params) {
  std::vector<Genome> pool;
  pool.reserve(16);
  for (auto s : {SurrogateKind::GP, SurrogateKind::RF, SurrogateKind::ET, SurrogateKind::GBRT})
    for (auto a : {AcquisitionKind::LCB, AcquisitionKind::EI, AcquisitionKind::PI,
                   AcquisitionKind::GP_HEDGE})
      pool.push_back({s, a, params});
  return pool;
}

double TrialHistory::best_objective() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : trials)
    if (!t.failed && t.objective < best) best = t.objective;
  return best;
}

Dataset TrialHistory::to_dataset(const ParamSpace& space) const {
  Dataset d;
  d.inputs.reserve(trials.size());
  d.targets.reserve(trials.size());
  for (const auto& t : trials) {
    d.inputs.push_back(space.normalize(t.point));
    d.targets.push_back(t.objective);
  }
  return d;
}

int resolve_n_init(const OptimizerConfig& cfg, std::size_t dims) {
  if (cfg.n_init > 0) return cfg.n_init;
  return std::max(10, 2 * static_cast<int>(dims));
}

BaseOptimizer::BaseOptimizer(Genome genome, ParamSpace space, OptimizerConfig cfg)
    : genome_(std::move(genome)),
      space_(std::move(space)),
      cfg_(cfg),
      n_init_(resolve_n_init(cfg, space_.size())) {
  validate(genome_.params);
}

ProposedPoint BaseOptimizer::ask(const TrialHistory& history, RandomSource& rng) {
  if (history.size() < static_cast<std::size_t>(n_init_)) return {space_.sample(rng), true, false};
  std::unique_ptr<Surrogate> model;
  try {
    model = fit_surrogate(genome_.surrogate, history.to_dataset(space_), rng, cfg_.surrogate);
  } catch (const FitError&) {
    return {space_.sample(rng), true, true};
  }
  AcquisitionKind arm = genome_.acquisition;
  if (arm == AcquisitionKind::GP_HEDGE) arm = hedge_choose(hedge_, genome_.params, rng);
  const double f_best = history.best_objective();
  const ArgminResult res =
      argmin_acquisition(*model, arm, genome_.params, f_best, space_, rng, cfg_.proposal);
  if (genome_.acquisition == AcquisitionKind::GP_HEDGE)
    pending_.push_back({res.point, arm, model->predict(res.unit).mean});
  return {res.point, false, false};
}

std::vector<ProposedPoint> BaseOptimizer::ask_batch(const TrialHistory& history, int n_points,
                                                    RandomSource& rng) {
  if (n_points < 1) throw ValidationError("ask_batch: n_points must be >= 1");
  TrialHistory scratch = history;
  double liar = history.best_objective();
  if (!std::isfinite(liar)) liar = 0.0;  // no real observation yet
  std::vector<ProposedPoint> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    out.push_back(ask(scratch, rng));
    Trial fake;
    fake.point = out.back().point;
    fake.objective = liar;
    fake.iteration = scratch.empty() ? 1 : scratch.trials.back().iteration;
    fake.genome = genome_;
    scratch.trials.push_back(std::move(fake));
  }
  return out;
}

void BaseOptimizer::tell(TrialHistory& history, const Trial& trial) {
  if (!std::isfinite(trial.objective))
    throw ValidationError("tell: objective must be finite");
  if (trial.iteration < 1) throw ValidationError("tell: iteration must be >= 1");
  space_.validate_point(trial.point);
  history.trials.push_back(trial);
  if (genome_.acquisition != AcquisitionKind::GP_HEDGE) return;
  for (auto it = pending_.begin(); it != pending_.end(); ++it) {
    if (it->point == trial.point) {
      hedge_ = hedge_update(hedge_, it->arm, it->mean);
      pending_.erase(it);
      return;
    }
  }
}

std::vector<EvalOutcome> evaluate_round(const ObjectiveFn& objective,
                                        const std::vector<ProposedPoint>& proposals) {
  auto eval_one = [&objective](const Point& pt) {
    EvalOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out.objective = objective(pt);
      out.failed = !std::isfinite(out.objective);
    } catch (const std::exception&) {
      out.failed = true;
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return out;
  };

  std::vector<EvalOutcome> outcomes(proposals.size());
  if (proposals.size() == 1) {
    outcomes[0] = eval_one(proposals[0].point);
    return outcomes;
  }
  std::vector<std::future<EvalOutcome>> futures;
  futures.reserve(proposals.size());
  for (const auto& p : proposals)
    futures.push_back(std::async(std::launch::async, eval_one, std::cref(p.point)));
  for (std::size_t i = 0; i < futures.size(); ++i) outcomes[i] = futures[i].get();
  return outcomes;
}

void settle_failures(const TrialHistory& history, std::vector<EvalOutcome>& outcomes) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& t : history.trials)
    if (!t.failed && t.objective > worst) worst = t.objective;
  for (const auto& o : outcomes)
    if (!o.failed && o.objective > worst) worst = o.objective;
  if (!std::isfinite(worst)) worst = 0.0;
  for (auto& o : outcomes)
    if (o.failed) o.objective = worst;
}

void fill_best(RunResult& result) {
  for (const auto& t : result.trials) {
    if (!t.failed && t.objective < result.best_objective) {
      result.best_objective = t.objective;
      result.best_point = t.point;
    }
  }
}

RunResult run_single(const Genome& genome, const ParamSpace& space, const ObjectiveFn& objective,
                     int N, int N_s, std::uint64_t seed, const OptimizerConfig& cfg) {
  if (N < 1) throw ValidationError("run: N must be >= 1");
  if (N_s < 1) throw ValidationError("run: N_s must be >= 1");
  BaseOptimizer opt(genome, space, cfg);
  RandomSource rng = RandomSource::derive(seed, kProposalStream);
  TrialHistory history;
  for (int round = 1; round <= N; ++round) {
    std::vector<ProposedPoint> props;
    if (N_s == 1) {
      props.push_back(opt.ask(history, rng));
    } else {
      props = opt.ask_batch(history, N_s, rng);
    }
    auto outcomes = evaluate_round(objective, props);
    settle_failures(history, outcomes);
    for (std::size_t s = 0; s < props.size(); ++s) {
      Trial t;
      t.point = props[s].point;
      t.objective = outcomes[s].objective;
      t.iteration = round;
      t.genome = genome;
      t.slot = static_cast<int>(s);
      t.failed = outcomes[s].failed;
      t.from_init = props[s].from_init;
      t.fallback = props[s].fallback;
      t.wall_ms = outcomes[s].wall_ms;
      opt.tell(history, t);
    }
  }
  RunResult result;
  result.trials = std::move(history.trials);
  fill_best(result);
  return result;
}

}  // namespace adabo
