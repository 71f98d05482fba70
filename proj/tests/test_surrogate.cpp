#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "adabo/errors.hpp"
#include "adabo/forest.hpp"
#include "adabo/gbrt.hpp"
#include "adabo/gp.hpp"
#include "adabo/surrogate.hpp"
#include "doctest.h"

using namespace adabo;

namespace {

// Independent Matern-5/2 correlation, written from the textbook formula
// rather than the library helper.
double m52_ref(double r) {
  const double s = std::sqrt(5.0) * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double scaled_dist(const std::vector<double>& a, std::span<const double> b,
                   const std::vector<double>& ls) {
  double r2 = 0.0;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const double d = (a[k] - b[k]) / ls[k];
    r2 += d * d;
  }
  return std::sqrt(r2);
}

// Dense closed-form GP posterior under the model's own fitted
// hyperparameters, solved with full-pivot LU instead of the library's
// Cholesky path.
Prediction dense_gp_oracle(const Dataset& data, const GpParams& p, std::span<const double> q) {
  const int n = static_cast<int>(data.size());
  const double y_mean =
      std::accumulate(data.targets.begin(), data.targets.end(), 0.0) / n;
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd yc(n);
  Eigen::VectorXd kstar(n);
  for (int i = 0; i < n; ++i) {
    yc(i) = data.targets[i] - y_mean;
    kstar(i) = p.amplitude2 * m52_ref(scaled_dist(data.inputs[i], q, p.length_scales));
    for (int j = 0; j < n; ++j) {
      K(i, j) =
          p.amplitude2 * m52_ref(scaled_dist(data.inputs[i],
                                             std::span<const double>(data.inputs[j]),
                                             p.length_scales));
      if (i == j) K(i, j) += p.noise;
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  const double mean = y_mean + kstar.dot(lu.solve(yc));
  const double var = p.amplitude2 - kstar.dot(lu.solve(kstar));
  return {mean, std::sqrt(std::max(0.0, var))};
}

Dataset random_dataset(RandomSource& rng, int n, int d) {
  Dataset data;
  for (int i = 0; i < n; ++i) {
    UnitVector x(d);
    for (int k = 0; k < d; ++k) x[k] = rng.uniform();
    data.inputs.push_back(std::move(x));
    data.targets.push_back(rng.uniform(-1.0, 1.0));
  }
  return data;
}

}  // namespace

TEST_CASE("GP interpolates a single training point") {
  Dataset data{{{0.5}}, {2.0}};
  RandomSource rng(1);
  const auto model = fit_surrogate(SurrogateKind::GP, data, rng, {});
  const Prediction at = model->predict(std::vector<double>{0.5});
  CHECK(at.mean == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(at.std >= 0.0);
}

TEST_CASE("GP matches the dense closed-form posterior on sin(6x)") {
  Dataset data;
  for (double x : {0.1, 0.5, 0.9}) {
    data.inputs.push_back({x});
    data.targets.push_back(std::sin(6.0 * x));
  }
  RandomSource rng(2);
  const GaussianProcess gp(data, rng, {});
  for (double q : {0.5, 0.2, 0.77}) {
    const Prediction got = gp.predict(std::vector<double>{q});
    const Prediction want = dense_gp_oracle(data, gp.params(), std::vector<double>{q});
    CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-8));
    CHECK(got.std * got.std == doctest::Approx(want.std * want.std).epsilon(1e-8));
  }
}

TEST_CASE("GP posterior equals the dense oracle over random small datasets") {
  RandomSource rng(3);
  SurrogateConfig cfg;
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 9));
    const int d = 1 + static_cast<int>(rng.uniform_int(0, 2));
    const Dataset data = random_dataset(rng, n, d);
    const GaussianProcess gp(data, rng, cfg);
    std::vector<UnitVector> queries;
    for (int t = 0; t < 5; ++t) {
      UnitVector q(d);
      for (int k = 0; k < d; ++k) q[k] = rng.uniform();
      queries.push_back(q);
    }
    const auto batched = gp.predict_many(queries);
    for (std::size_t t = 0; t < queries.size(); ++t) {
      const Prediction one = gp.predict(queries[t]);
      const Prediction want = dense_gp_oracle(data, gp.params(), queries[t]);
      CHECK(std::abs(one.mean - want.mean) < 1e-8);
      CHECK(std::abs(one.std * one.std - want.std * want.std) < 1e-8);
      CHECK(std::abs(batched[t].mean - want.mean) < 1e-8);
      CHECK(std::abs(batched[t].std * batched[t].std - want.std * want.std) < 1e-8);
    }
  }
}

TEST_CASE("GP with zero configured noise collapses onto its data") {
  Dataset data{{{0.05}, {0.35}, {0.65}, {0.95}}, {0.3, -0.2, 0.8, 0.1}};
  RandomSource rng(4);
  SurrogateConfig cfg;
  cfg.gp_noise = 0.0;
  const auto model = fit_surrogate(SurrogateKind::GP, data, rng, cfg);
  for (const auto& x : data.inputs) CHECK(model->predict(x).std <= 1e-4);
}

TEST_CASE("forests answer constant targets with the constant and zero spread") {
  Dataset data;
  RandomSource seed_rng(5);
  for (int i = 0; i < 6; ++i) {
    data.inputs.push_back({seed_rng.uniform(), seed_rng.uniform()});
    data.targets.push_back(1.0);
  }
  for (auto kind : {SurrogateKind::RF, SurrogateKind::ET}) {
    RandomSource rng(6);
    const auto model = fit_surrogate(kind, data, rng, {});
    const Prediction at = model->predict(std::vector<double>{0.4, 0.4});
    CHECK(at.mean == 1.0);
    CHECK(at.std == 0.0);
  }
}

TEST_CASE("tree aggregation takes the mean and population std") {
  const double two[] = {1.0, 3.0};
  const Prediction agg = aggregate_tree_predictions(two, 0.0);
  CHECK(agg.mean == 2.0);
  CHECK(agg.std == 1.0);

  const double flat[] = {2.0, 2.0, 2.0};
  CHECK(aggregate_tree_predictions(flat, 0.0).std == 0.0);
  CHECK(aggregate_tree_predictions(flat, 0.25).std == 0.25);
}

TEST_CASE("GBRT quantile triple is monotone after repair") {
  RandomSource rng(7);
  Dataset data = random_dataset(rng, 40, 2);
  const GradientBoostedQuantiles model(data, {});
  for (int t = 0; t < 50; ++t) {
    const UnitVector q{rng.uniform(), rng.uniform()};
    auto raw = model.predict_quantiles(q);
    std::sort(raw.begin(), raw.end());
    const Prediction at = model.predict(q);
    CHECK(at.mean == raw[1]);
    CHECK(at.std == doctest::Approx((raw[2] - raw[0]) / 2.0));
    CHECK(at.std >= 0.0);
  }
}

TEST_CASE("tree ensemble means stay between the extreme targets") {
  RandomSource rng(8);
  for (auto kind : {SurrogateKind::RF, SurrogateKind::ET}) {
    const Dataset data = random_dataset(rng, 25, 3);
    const double lo = *std::min_element(data.targets.begin(), data.targets.end());
    const double hi = *std::max_element(data.targets.begin(), data.targets.end());
    RandomSource fit_rng(9);
    const auto model = fit_surrogate(kind, data, fit_rng, {});
    for (int t = 0; t < 30; ++t) {
      const UnitVector q{rng.uniform(), rng.uniform(), rng.uniform()};
      const double mean = model->predict(q).mean;
      CHECK(mean >= lo);
      CHECK(mean <= hi);
    }
  }
}

TEST_CASE("fitting is deterministic for a fixed seed") {
  RandomSource data_rng(10);
  const Dataset data = random_dataset(data_rng, 15, 2);
  for (auto kind :
       {SurrogateKind::GP, SurrogateKind::RF, SurrogateKind::ET, SurrogateKind::GBRT}) {
    RandomSource rng_a(11);
    RandomSource rng_b(11);
    const auto a = fit_surrogate(kind, data, rng_a, {});
    const auto b = fit_surrogate(kind, data, rng_b, {});
    RandomSource query_rng(12);
    for (int t = 0; t < 20; ++t) {
      const UnitVector q{query_rng.uniform(), query_rng.uniform()};
      const Prediction pa = a->predict(q);
      const Prediction pb = b->predict(q);
      CHECK(pa.mean == pb.mean);
      CHECK(pa.std == pb.std);
    }
  }
}

TEST_CASE("GBRT consumes no randomness while fitting") {
  RandomSource data_rng(13);
  const Dataset data = random_dataset(data_rng, 12, 1);
  RandomSource fresh(1);
  RandomSource advanced(1);
  for (int i = 0; i < 100; ++i) advanced.uniform();
  const auto a = fit_surrogate(SurrogateKind::GBRT, data, fresh, {});
  const auto b = fit_surrogate(SurrogateKind::GBRT, data, advanced, {});
  const Prediction pa = a->predict(std::vector<double>{0.3});
  const Prediction pb = b->predict(std::vector<double>{0.3});
  CHECK(pa.mean == pb.mean);
  CHECK(pa.std == pb.std);
}

TEST_CASE("predictions are finite with nonnegative std everywhere") {
  RandomSource rng(14);
  for (auto kind :
       {SurrogateKind::GP, SurrogateKind::RF, SurrogateKind::ET, SurrogateKind::GBRT}) {
    const Dataset data = random_dataset(rng, 20, 2);
    RandomSource fit_rng(15);
    const auto model = fit_surrogate(kind, data, fit_rng, {});
    std::vector<UnitVector> queries;
    for (int t = 0; t < 50; ++t) queries.push_back({rng.uniform(), rng.uniform()});
    for (const Prediction& p : model->predict_many(queries)) {
      CHECK(std::isfinite(p.mean));
      CHECK(std::isfinite(p.std));
      CHECK(p.std >= 0.0);
    }
  }
}

TEST_CASE("batched prediction agrees with pointwise prediction") {
  RandomSource rng(16);
  const Dataset data = random_dataset(rng, 18, 2);
  std::vector<UnitVector> queries;
  for (int t = 0; t < 25; ++t) queries.push_back({rng.uniform(), rng.uniform()});
  for (auto kind :
       {SurrogateKind::GP, SurrogateKind::RF, SurrogateKind::ET, SurrogateKind::GBRT}) {
    RandomSource fit_rng(17);
    const auto model = fit_surrogate(kind, data, fit_rng, {});
    const auto batched = model->predict_many(queries);
    for (std::size_t t = 0; t < queries.size(); ++t) {
      const Prediction one = model->predict(queries[t]);
      CHECK(batched[t].mean == doctest::Approx(one.mean).epsilon(1e-10));
      CHECK(batched[t].std == doctest::Approx(one.std).epsilon(1e-10));
    }
  }
}

TEST_CASE("fit_surrogate rejects malformed datasets") {
  RandomSource rng(18);
  CHECK_THROWS_AS(fit_surrogate(SurrogateKind::GP, {}, rng, {}), ValidationError);
  CHECK_THROWS_AS(fit_surrogate(SurrogateKind::RF, {{{0.1}, {0.2}}, {1.0}}, rng, {}),
                  ValidationError);
  CHECK_THROWS_AS(fit_surrogate(SurrogateKind::ET, {{{0.1}, {0.2, 0.3}}, {1.0, 2.0}}, rng, {}),
                  ValidationError);
  CHECK_THROWS_AS(
      fit_surrogate(SurrogateKind::GBRT, {{{0.1}}, {std::nan("")}}, rng, {}), ValidationError);
}

TEST_CASE("queries outside the unit cube are rejected") {
  Dataset data{{{0.2}, {0.8}}, {0.0, 1.0}};
  RandomSource rng(19);
  const auto model = fit_surrogate(SurrogateKind::RF, data, rng, {});
  CHECK_THROWS_AS(model->predict(std::vector<double>{1.5}), ValidationError);
  CHECK_THROWS_AS(model->predict(std::vector<double>{-0.1}), ValidationError);
  CHECK_THROWS_AS(model->predict(std::vector<double>{0.5, 0.5}), ValidationError);
}

TEST_CASE("quantile interpolates between order statistics") {
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0}, 0.25) == 1.25);
  CHECK(quantile({5.0, -1.0, 2.0}, 0.0) == -1.0);
  CHECK(quantile({5.0, -1.0, 2.0}, 1.0) == 5.0);
}

TEST_CASE("surrogate kind names round-trip") {
  for (auto kind :
       {SurrogateKind::GP, SurrogateKind::RF, SurrogateKind::ET, SurrogateKind::GBRT})
    CHECK(surrogate_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(surrogate_from_string("SVM"), ConfigError);
}
