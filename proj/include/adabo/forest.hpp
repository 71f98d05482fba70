#pragma once

#include "adabo/surrogate.hpp"

namespace adabo {

// Controls for a single regression tree fit.
struct TreeOptions {
  // < 0 means grow until nodes are pure or too small to split.
  int max_depth = -1;
  // 0 means consider every feature; otherwise a fresh random subset of this
  // size is drawn per node.
  int feature_subset = 0;
  // true: one uniform random threshold per candidate feature (extra-trees
  // style); false: exhaustive midpoint scan for the best SSE reduction.
  bool random_thresholds = false;
};

// CART-style regression tree over unit-cube inputs. Leaves default to the
// mean target; boosting rewrites them via set_leaf_value.
class RegressionTree {
 public:
  // sample indices may repeat (bootstrap). Targets come from `targets`, not
  // data.targets, so boosting can fit gradients against the same inputs.
  void fit(const Dataset& data, std::span<const double> targets,
           std::span<const int> sample, const TreeOptions& opt, RandomSource& rng);

  double predict(std::span<const double> x) const { return nodes_[find_leaf(x)].value; }
  int find_leaf(std::span<const double> x) const;
  void set_leaf_value(int node, double value) { nodes_[node].value = value; }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  int build(const Dataset& data, std::span<const double> targets, std::vector<int>& idx,
            int begin, int end, int depth, const TreeOptions& opt, RandomSource& rng);

  std::vector<Node> nodes_;
};

// Bagged ensemble covering both random-forest and extra-trees behavior.
struct ForestOptions {
  int trees = 100;
  bool bootstrap = true;
  TreeOptions tree;
  double std_floor = 0.0;
};

class ForestModel : public Surrogate {
 public:
  ForestModel(const Dataset& data, RandomSource& rng, const ForestOptions& opt);
  Prediction predict(std::span<const double> x) const override;

 private:
  std::vector<RegressionTree> trees_;
  std::size_t dims_ = 0;
  double std_floor_ = 0.0;
};

// Mean and population standard deviation over per-tree outputs, with the
// std floored. Split out so the arithmetic is testable in isolation.
Prediction aggregate_tree_predictions(std::span<const double> values, double std_floor);

ForestOptions random_forest_options(const SurrogateConfig& cfg, std::size_t dims);
ForestOptions extra_trees_options(const SurrogateConfig& cfg);

}  // namespace adabo
