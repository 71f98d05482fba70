#pragma once

#include <Eigen/Dense>

#include "adabo/surrogate.hpp"

namespace adabo {

// Fitted GP hyperparameters. noise includes the stabilizing jitter.
struct GpParams {
  double amplitude2 = 1.0;
  std::vector<double> length_scales;
  double noise = 1e-6;
};

// Gaussian process regression with a Matern-5/2 kernel, one length scale per
// dimension, constant amplitude, and a constant prior mean equal to the
// training target mean. Hyperparameters maximize the log marginal likelihood
// over a bounded log-space box via multi-start coordinate pattern search.
class GaussianProcess : public Surrogate {
 public:
  GaussianProcess(const Dataset& data, RandomSource& rng, const SurrogateConfig& cfg);

  Prediction predict(std::span<const double> x) const override;
  std::vector<Prediction> predict_many(const std::vector<UnitVector>& xs) const override;

  const GpParams& params() const { return params_; }
  double log_marginal_likelihood() const { return best_lml_; }

 private:
  Eigen::MatrixXd train_;  // n x d, normalized inputs
  Eigen::VectorXd y_;      // targets minus y_mean_
  double y_mean_ = 0.0;
  GpParams params_;
  Eigen::MatrixXd chol_lower_;  // L with L L^T = K(train, train) + noise I
  Eigen::VectorXd alpha_;       // (K + noise I)^{-1} y_
  double best_lml_ = 0.0;
};

// Matern-5/2 correlation at scaled squared distance r2 (r = sqrt(r2) already
// divided by the length scales). Exposed for the closed-form test oracles.
double matern52(double r2);

}  // namespace adabo
