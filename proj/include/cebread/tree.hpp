#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cebread/rng.hpp"

namespace cebread::models {

// Training data as the models see it: row-major features and class indices
// in [0, n_classes).
struct TrainingView {
  std::span<const double> values;
  std::size_t cols = 0;
  std::span<const int> classes;
  std::size_t n_classes = 0;

  std::size_t rows() const { return classes.size(); }
  std::span<const double> row(std::size_t i) const { return values.subspan(i * cols, cols); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// 1 - sum p_i^2. Throws std::invalid_argument on all-zero counts.
double gini(std::span<const std::size_t> class_counts);

enum class MaxFeatures { sqrt, log2, all };

std::size_t resolve_max_features(MaxFeatures mode, std::size_t n_features);

struct TreeParams {
  MaxFeatures max_features = MaxFeatures::sqrt;
  std::optional<std::size_t> max_depth;  // nullopt = unlimited
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  std::vector<std::size_t> counts;  // per class
  std::size_t samples = 0;
  // (samples / root samples) * Gini decrease of this node's split; 0 at leaves.
  double weighted_decrease = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features, std::size_t n_classes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return n_classes_; }

  const TreeNode& leaf_for(std::span<const double> x) const;
  // Majority class of the leaf, ties to the lowest class index.
  int predict(std::span<const double> x) const;
  std::size_t depth() const;

  // Per feature sum of weighted impurity decrease over this tree's splits.
  std::vector<double> impurity_importance() const;

private:
  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
};

// Grows a greedy Gini tree on `samples` (indices into data, repeats allowed
// for bootstrap draws). At each node max_features candidate features are
// drawn without replacement from rng.
DecisionTree train_tree(const TrainingView& data, std::span<const std::size_t> samples,
                        const TreeParams& params, Rng& rng);

// All rows once.
DecisionTree train_tree(const TrainingView& data, const TreeParams& params, Rng& rng);

}  // namespace cebread::models
