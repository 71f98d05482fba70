#include "adabo/gbrt.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adabo/errors.hpp"

namespace adabo {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

GradientBoostedQuantiles::GradientBoostedQuantiles(const Dataset& data,
                                                   const SurrogateConfig& cfg)
    : learning_rate_(cfg.gbrt_learning_rate), dims_(data.dims()) {
  if (cfg.gbrt_stages < 1) throw FitError("gbrt: needs at least one stage");
  for (auto& ens : ensembles_) fit_ensemble(ens, data, cfg);
}

void GradientBoostedQuantiles::fit_ensemble(Ensemble& ens, const Dataset& data,
                                            const SurrogateConfig& cfg) {
  const std::size_t n = data.size();
  ens.init = quantile(data.targets, ens.q);
  std::vector<double> current(n, ens.init);
  std::vector<double> grad(n);
  std::vector<int> sample(n);
  for (std::size_t i = 0; i < n; ++i) sample[i] = static_cast<int>(i);

  TreeOptions tree_opt;
  tree_opt.max_depth = cfg.gbrt_max_depth;

  // Boosting never draws from it; trees here split exhaustively.
  RandomSource unused(0);

  ens.trees.reserve(static_cast<std::size_t>(cfg.gbrt_stages));
  for (int stage = 0; stage < cfg.gbrt_stages; ++stage) {
    // Pinball-loss gradient descent direction: q above the fit, q-1 at or
    // below it.
    for (std::size_t i = 0; i < n; ++i)
      grad[i] = (data.targets[i] - current[i] > 0.0) ? ens.q : ens.q - 1.0;
    RegressionTree tree;
    tree.fit(data, grad, sample, tree_opt, unused);
    // Leaves refit to the residual quantile: the pinball-optimal constant
    // for the samples that land there.
    std::map<int, std::vector<double>> leaf_residuals;
    for (std::size_t i = 0; i < n; ++i)
      leaf_residuals[tree.find_leaf(data.inputs[i])].push_back(data.targets[i] - current[i]);
    for (auto& [leaf, residuals] : leaf_residuals)
      tree.set_leaf_value(leaf, quantile(std::move(residuals), ens.q));
    for (std::size_t i = 0; i < n; ++i)
      current[i] += learning_rate_ * tree.predict(data.inputs[i]);
    ens.trees.push_back(std::move(tree));
  }
}

std::array<double, 3> GradientBoostedQuantiles::predict_quantiles(
    std::span<const double> x) const {
  std::array<double, 3> out{};
  for (std::size_t e = 0; e < 3; ++e) {
    double v = ensembles_[e].init;
    for (const auto& tree : ensembles_[e].trees) v += learning_rate_ * tree.predict(x);
    out[e] = v;
  }
  return out;
}

Prediction GradientBoostedQuantiles::predict(std::span<const double> x) const {
  check_query(x, dims_);
  auto q = predict_quantiles(x);
  std::sort(q.begin(), q.end());  // repairs any quantile crossing
  return {q[1], std::max(0.0, (q[2] - q[0]) / 2.0)};
}

}  // namespace adabo
