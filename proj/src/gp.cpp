#include "adabo/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "adabo/errors.hpp"

namespace adabo {

double matern52(double r2) {
  const double s = std::sqrt(5.0 * r2);
  return (1.0 + s + 5.0 * r2 / 3.0) * std::exp(-s);
}

namespace {

constexpr double kJitter = 1e-12;

// Hyperparameters are searched in log space: one log length scale per
// dimension followed by the log amplitude.
double eval_lml(const std::vector<Eigen::MatrixXd>& sqdiff, const Eigen::VectorXd& y,
                double noise, const std::vector<double>& theta, Eigen::MatrixXd& K,
                Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::Index n = y.size();
  const std::size_t d = sqdiff.size();
  Eigen::ArrayXXd r2 = Eigen::ArrayXXd::Zero(n, n);
  for (std::size_t k = 0; k < d; ++k) {
    r2 += sqdiff[k].array() * std::exp(-2.0 * theta[k]);
  }
  const double amp2 = std::exp(theta[d]);
  Eigen::ArrayXXd s = (5.0 * r2).sqrt();
  K = (amp2 * (1.0 + s + (5.0 / 3.0) * r2) * (-s).exp()).matrix();
  K.diagonal().array() += noise;
  llt.compute(K);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd alpha = llt.solve(y);
  const double logdet = llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

}  // namespace

GaussianProcess::GaussianProcess(const Dataset& data, RandomSource& rng,
                                 const SurrogateConfig& cfg) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const std::size_t d = data.dims();
  train_.resize(n, static_cast<Eigen::Index>(d));
  Eigen::VectorXd raw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) train_(i, static_cast<Eigen::Index>(k)) = data.inputs[i][k];
    raw(i) = data.targets[i];
  }
  y_mean_ = raw.mean();
  y_ = raw.array() - y_mean_;
  const double yvar = y_.squaredNorm() / static_cast<double>(n);
  const double amp_center = std::max(yvar, 1e-8);
  params_.noise = std::max(cfg.gp_noise, 0.0) + kJitter;

  std::vector<Eigen::MatrixXd> sqdiff(d);
  for (std::size_t k = 0; k < d; ++k) {
    const Eigen::VectorXd col = train_.col(static_cast<Eigen::Index>(k));
    sqdiff[k] = (col.replicate(1, n) - col.transpose().replicate(n, 1)).array().square();
  }

  const double l_lo = std::log(0.03), l_hi = std::log(30.0);
  const double a_lo = std::log(amp_center * 1e-3), a_hi = std::log(amp_center * 1e3);
  auto clamp = [](double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); };

  Eigen::MatrixXd K;
  Eigen::LLT<Eigen::MatrixXd> llt;
  auto eval = [&](const std::vector<double>& theta) {
    return eval_lml(sqdiff, y_, params_.noise, theta, K, llt);
  };

  const int restarts = std::max(1, cfg.gp_restarts);
  std::vector<double> best_theta;
  double best = -std::numeric_limits<double>::infinity();
  // Two shrinking coordinate sweeps per start keep the fit cost bounded; the
  // surface is smooth enough that this lands within a tight LML neighborhood.
  static constexpr double kSteps[] = {0.8, 0.3};
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> theta(d + 1);
    if (r == 0) {
      for (std::size_t k = 0; k < d; ++k) theta[k] = 0.0;  // length scale 1
      theta[d] = std::log(amp_center);
    } else {
      for (std::size_t k = 0; k < d; ++k) theta[k] = rng.uniform(l_lo, l_hi);
      theta[d] = rng.uniform(a_lo, a_hi);
    }
    double cur = eval(theta);
    for (double step : kSteps) {
      for (std::size_t k = 0; k <= d; ++k) {
        const double lo = (k < d) ? l_lo : a_lo;
        const double hi = (k < d) ? l_hi : a_hi;
        const double saved = theta[k];
        for (double sign : {1.0, -1.0}) {
          const double cand = clamp(saved + sign * step, lo, hi);
          if (cand == theta[k]) continue;
          theta[k] = cand;
          const double v = eval(theta);
          if (v > cur) {
            cur = v;
            break;
          }
          theta[k] = saved;
        }
      }
    }
    if (cur > best) {
      best = cur;
      best_theta = theta;
    }
  }
  if (best_theta.empty() || !std::isfinite(best))
    throw FitError("gp: no admissible hyperparameters found");

  best_lml_ = eval(best_theta);  // rebuilds K and llt at the winner
  params_.length_scales.resize(d);
  for (std::size_t k = 0; k < d; ++k) params_.length_scales[k] = std::exp(best_theta[k]);
  params_.amplitude2 = std::exp(best_theta[d]);
  chol_lower_ = llt.matrixL();
  alpha_ = llt.solve(y_);
}

Prediction GaussianProcess::predict(std::span<const double> x) const {
  const std::size_t d = params_.length_scales.size();
  check_query(x, d);
  const Eigen::Index n = train_.rows();
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double z = (x[k] - train_(i, static_cast<Eigen::Index>(k))) / params_.length_scales[k];
      r2 += z * z;
    }
    kstar(i) = params_.amplitude2 * matern52(r2);
  }
  const double mean = y_mean_ + kstar.dot(alpha_);
  const Eigen::VectorXd v = chol_lower_.triangularView<Eigen::Lower>().solve(kstar);
  const double var = std::max(0.0, params_.amplitude2 - v.squaredNorm());
  return {mean, std::sqrt(var)};
}

std::vector<Prediction> GaussianProcess::predict_many(const std::vector<UnitVector>& xs) const {
  const std::size_t d = params_.length_scales.size();
  const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index n = train_.rows();
  if (m == 0) return {};
  // Scale coordinates by the length scales once, then get all pairwise
  // distances from a single matrix product.
  Eigen::MatrixXd qs(m, static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < m; ++j) {
    check_query(xs[j], d);
    for (std::size_t k = 0; k < d; ++k)
      qs(j, static_cast<Eigen::Index>(k)) = xs[j][k] / params_.length_scales[k];
  }
  Eigen::MatrixXd ts(n, static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k)
      ts(i, static_cast<Eigen::Index>(k)) =
          train_(i, static_cast<Eigen::Index>(k)) / params_.length_scales[k];
  Eigen::MatrixXd r2 = -2.0 * qs * ts.transpose();
  r2.colwise() += qs.rowwise().squaredNorm();
  r2.rowwise() += ts.rowwise().squaredNorm().transpose();
  r2 = r2.cwiseMax(0.0);  // guards tiny negatives from cancellation
  Eigen::ArrayXXd s = (5.0 * r2.array()).sqrt();
  Eigen::MatrixXd kstar =
      (params_.amplitude2 * (1.0 + s + (5.0 / 3.0) * r2.array()) * (-s).exp()).matrix();
  const Eigen::VectorXd means = kstar * alpha_;
  const Eigen::MatrixXd v = chol_lower_.triangularView<Eigen::Lower>().solve(kstar.transpose());
  std::vector<Prediction> out(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    const double var = std::max(0.0, params_.amplitude2 - v.col(j).squaredNorm());
    out[static_cast<std::size_t>(j)] = {y_mean_ + means(j), std::sqrt(var)};
  }
  return out;
}

}  // namespace adabo
