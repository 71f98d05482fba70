#pragma once

#include <array>

#include "adabo/forest.hpp"

namespace adabo {

// Quantile of sorted-on-demand values with linear interpolation between
// order statistics; q in [0, 1].
double quantile(std::vector<double> values, double q);

// Pinball-loss gradient boosting at the 0.16 / 0.50 / 0.84 quantiles. The
// median ensemble is the predictive mean, half the central spread the
// predictive std. Fitting consumes no randomness.
class GradientBoostedQuantiles : public Surrogate {
 public:
  GradientBoostedQuantiles(const Dataset& data, const SurrogateConfig& cfg);

  Prediction predict(std::span<const double> x) const override;

  // The raw (q16, q50, q84) triple before the monotonic sort.
  std::array<double, 3> predict_quantiles(std::span<const double> x) const;

 private:
  struct Ensemble {
    double q = 0.0;
    double init = 0.0;
    std::vector<RegressionTree> trees;
  };

  void fit_ensemble(Ensemble& ens, const Dataset& data, const SurrogateConfig& cfg);

  std::array<Ensemble, 3> ensembles_{{{0.16, 0.0, {}}, {0.50, 0.0, {}}, {0.84, 0.0, {}}}};
  double learning_rate_ = 0.1;
  std::size_t dims_ = 0;
};

}  // namespace adabo
