#include "adabo/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adabo/errors.hpp"

namespace adabo {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double child_sse = std::numeric_limits<double>::infinity();
};

double node_sse(double sum, double sumsq, double count) {
  return std::max(0.0, sumsq - sum * sum / count);
}

}  // namespace

int RegressionTree::find_leaf(std::span<const double> x) const {
  int id = 0;
  while (nodes_[id].feature >= 0) {
    id = x[static_cast<std::size_t>(nodes_[id].feature)] < nodes_[id].threshold ? nodes_[id].left
                                                                                : nodes_[id].right;
  }
  return id;
}

void RegressionTree::fit(const Dataset& data, std::span<const double> targets,
                         std::span<const int> sample, const TreeOptions& opt, RandomSource& rng) {
  nodes_.clear();
  std::vector<int> idx(sample.begin(), sample.end());
  build(data, targets, idx, 0, static_cast<int>(idx.size()), 0, opt, rng);
}

int RegressionTree::build(const Dataset& data, std::span<const double> targets,
                          std::vector<int>& idx, int begin, int end, int depth,
                          const TreeOptions& opt, RandomSource& rng) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  const int m = end - begin;
  double sum = 0.0, sumsq = 0.0;
  double tmin = targets[static_cast<std::size_t>(idx[begin])];
  double tmax = tmin;
  for (int i = begin; i < end; ++i) {
    const double t = targets[static_cast<std::size_t>(idx[i])];
    sum += t;
    sumsq += t * t;
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  nodes_[id].value = sum / m;
  if (m < 2 || tmin == tmax || (opt.max_depth >= 0 && depth >= opt.max_depth)) return id;

  const std::size_t d = data.dims();
  std::vector<int> feats(d);
  std::iota(feats.begin(), feats.end(), 0);
  std::size_t n_feats = d;
  if (opt.feature_subset > 0 && static_cast<std::size_t>(opt.feature_subset) < d) {
    n_feats = static_cast<std::size_t>(opt.feature_subset);
    for (std::size_t j = 0; j < n_feats; ++j) {
      const std::size_t pick =
          j + static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(d - 1 - j)));
      std::swap(feats[j], feats[pick]);
    }
  }

  Split best;
  for (std::size_t fi = 0; fi < n_feats; ++fi) {
    const int f = feats[fi];
    if (opt.random_thresholds) {
      double lo = data.inputs[static_cast<std::size_t>(idx[begin])][static_cast<std::size_t>(f)];
      double hi = lo;
      for (int i = begin + 1; i < end; ++i) {
        const double v = data.inputs[static_cast<std::size_t>(idx[i])][static_cast<std::size_t>(f)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(lo < hi)) continue;
      const double thr = rng.uniform(lo, hi);
      double lsum = 0.0, lsq = 0.0;
      int lcount = 0;
      for (int i = begin; i < end; ++i) {
        const int s = idx[i];
        if (data.inputs[static_cast<std::size_t>(s)][static_cast<std::size_t>(f)] < thr) {
          const double t = targets[static_cast<std::size_t>(s)];
          lsum += t;
          lsq += t * t;
          ++lcount;
        }
      }
      if (lcount == 0 || lcount == m) continue;
      const double rsum = sum - lsum, rsq = sumsq - lsq;
      const double sse = node_sse(lsum, lsq, lcount) + node_sse(rsum, rsq, m - lcount);
      if (sse < best.child_sse) best = {f, thr, sse};
    } else {
      // Exhaustive scan: sort this node's samples along f (ties broken by
      // index so rebuilds are reproducible), then walk the split positions.
      std::vector<int> order(idx.begin() + begin, idx.begin() + end);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = data.inputs[static_cast<std::size_t>(a)][static_cast<std::size_t>(f)];
        const double vb = data.inputs[static_cast<std::size_t>(b)][static_cast<std::size_t>(f)];
        return va != vb ? va < vb : a < b;
      });
      double lsum = 0.0, lsq = 0.0;
      for (int p = 1; p < m; ++p) {
        const int prev = order[static_cast<std::size_t>(p - 1)];
        const double tprev = targets[static_cast<std::size_t>(prev)];
        lsum += tprev;
        lsq += tprev * tprev;
        const double va =
            data.inputs[static_cast<std::size_t>(prev)][static_cast<std::size_t>(f)];
        const double vb = data.inputs[static_cast<std::size_t>(
            order[static_cast<std::size_t>(p)])][static_cast<std::size_t>(f)];
        if (!(va < vb)) continue;
        const double sse =
            node_sse(lsum, lsq, p) + node_sse(sum - lsum, sumsq - lsq, m - p);
        if (sse < best.child_sse) best = {f, (va + vb) / 2.0, sse};
      }
    }
  }
  if (best.feature < 0) return id;

  const auto mid = std::stable_partition(
      idx.begin() + begin, idx.begin() + end, [&](int s) {
        return data.inputs[static_cast<std::size_t>(s)][static_cast<std::size_t>(best.feature)] <
               best.threshold;
      });
  const int split_at = static_cast<int>(mid - idx.begin());
  nodes_[id].feature = best.feature;
  nodes_[id].threshold = best.threshold;
  const int left = build(data, targets, idx, begin, split_at, depth + 1, opt, rng);
  const int right = build(data, targets, idx, split_at, end, depth + 1, opt, rng);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

Prediction aggregate_tree_predictions(std::span<const double> values, double std_floor) {
  const double t = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= t;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= t;
  return {mean, std::max(std::sqrt(var), std_floor)};
}

ForestModel::ForestModel(const Dataset& data, RandomSource& rng, const ForestOptions& opt)
    : dims_(data.dims()), std_floor_(opt.std_floor) {
  if (opt.trees < 1) throw FitError("forest: needs at least one tree");
  const int n = static_cast<int>(data.size());
  trees_.resize(static_cast<std::size_t>(opt.trees));
  std::vector<int> sample(static_cast<std::size_t>(n));
  for (auto& tree : trees_) {
    if (opt.bootstrap) {
      for (auto& s : sample) s = static_cast<int>(rng.uniform_int(0, n - 1));
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    tree.fit(data, data.targets, sample, opt.tree, rng);
  }
}

Prediction ForestModel::predict(std::span<const double> x) const {
  check_query(x, dims_);
  std::vector<double> values(trees_.size());
  for (std::size_t t = 0; t < trees_.size(); ++t) values[t] = trees_[t].predict(x);
  return aggregate_tree_predictions(values, std_floor_);
}

ForestOptions random_forest_options(const SurrogateConfig& cfg, std::size_t dims) {
  ForestOptions opt;
  opt.trees = cfg.forest_trees;
  opt.bootstrap = true;
  opt.tree.feature_subset = static_cast<int>(std::max<std::size_t>(1, (dims + 2) / 3));
  opt.tree.random_thresholds = false;
  opt.std_floor = cfg.forest_std_floor;
  return opt;
}

ForestOptions extra_trees_options(const SurrogateConfig& cfg) {
  ForestOptions opt;
  opt.trees = cfg.forest_trees;
  opt.bootstrap = false;
  opt.tree.feature_subset = 0;
  opt.tree.random_thresholds = true;
  opt.std_floor = cfg.forest_std_floor;
  return opt;
}

}  // namespace adabo
