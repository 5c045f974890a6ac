#include "cebread/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cebread::models {

double gini(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (auto c : class_counts) total += c;
  if (total == 0) throw std::invalid_argument("gini of an empty node");
  const double n = static_cast<double>(total);
  double sum_sq = 0.0;
  for (auto c : class_counts) {
    const double p = static_cast<double>(c) / n;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

std::size_t resolve_max_features(MaxFeatures mode, std::size_t n_features) {
  if (n_features == 0) return 0;
  std::size_t k = n_features;
  switch (mode) {
    case MaxFeatures::sqrt:
      k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features)));
      break;
    case MaxFeatures::log2:
      k = static_cast<std::size_t>(std::log2(static_cast<double>(n_features)));
      break;
    case MaxFeatures::all:
      break;
  }
  return std::clamp<std::size_t>(k, 1, n_features);
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features,
                           std::size_t n_classes)
    : nodes_(std::move(nodes)), n_features_(n_features), n_classes_(n_classes) {}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                       : n.right);
  }
  return nodes_[i];
}

int DecisionTree::predict(std::span<const double> x) const {
  const auto& counts = leaf_for(x).counts;
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  // Children always come after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) continue;
    d[static_cast<std::size_t>(n.left)] = d[i] + 1;
    d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

std::vector<double> DecisionTree::impurity_importance() const {
  std::vector<double> imp(n_features_, 0.0);
  for (const auto& n : nodes_) {
    if (!n.is_leaf()) imp[static_cast<std::size_t>(n.feature)] += n.weighted_decrease;
  }
  return imp;
}

namespace {

// Gains at or below this are treated as no improvement.
constexpr double kMinGain = 1e-12;

double gini_from(const std::vector<std::size_t>& counts, double n) {
  double sum_sq = 0.0;
  for (auto c : counts) sum_sq += static_cast<double>(c) * static_cast<double>(c);
  return 1.0 - sum_sq / (n * n);
}

class TreeBuilder {
public:
  TreeBuilder(const TrainingView& data, const TreeParams& params, Rng& rng, double root_samples)
      : data_(data), params_(params), rng_(rng), root_samples_(root_samples),
        n_candidates_(resolve_max_features(params.max_features, data.cols)) {}

  std::vector<TreeNode> build(std::vector<std::size_t> samples) {
    grow(std::move(samples), 0);
    return std::move(nodes_);
  }

private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  std::vector<std::size_t> count_classes(const std::vector<std::size_t>& samples) const {
    std::vector<std::size_t> counts(data_.n_classes, 0);
    for (auto s : samples) ++counts[static_cast<std::size_t>(data_.classes[s])];
    return counts;
  }

  Split best_split(const std::vector<std::size_t>& samples,
                   const std::vector<std::size_t>& counts, double parent_gini) {
    Split best;
    const double n = static_cast<double>(samples.size());
    std::vector<std::pair<double, int>> column(samples.size());
    std::vector<std::size_t> left(data_.n_classes);
    std::vector<std::size_t> right(data_.n_classes);
    for (std::size_t f : rng_.sample_without_replacement(data_.cols, n_candidates_)) {
      for (std::size_t i = 0; i < samples.size(); ++i) {
        column[i] = {data_.at(samples[i], f), data_.classes[samples[i]]};
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      std::fill(left.begin(), left.end(), 0);
      right = counts;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        const auto cls = static_cast<std::size_t>(column[i].second);
        ++left[cls];
        --right[cls];
        const double lo = column[i].first, hi = column[i + 1].first;
        if (lo == hi) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        const double gain =
            parent_gini - (nl / n) * gini_from(left, nl) - (nr / n) * gini_from(right, nr);
        if (gain > best.gain + kMinGain) {
          double mid = lo + (hi - lo) / 2.0;
          if (mid >= hi) mid = lo;
          best = {static_cast<int>(f), mid, gain};
        }
      }
    }
    return best;
  }

  int grow(std::vector<std::size_t> samples, std::size_t depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    TreeNode node;
    node.counts = count_classes(samples);
    node.samples = samples.size();
    const double parent_gini = gini_from(node.counts, static_cast<double>(samples.size()));

    const bool depth_reached = params_.max_depth && depth >= *params_.max_depth;
    Split split;
    if (!depth_reached && samples.size() >= 2 && parent_gini > 0.0) {
      split = best_split(samples, node.counts, parent_gini);
    }
    if (split.feature < 0 || split.gain <= kMinGain) {
      nodes_[static_cast<std::size_t>(index)] = std::move(node);
      return index;
    }

    std::vector<std::size_t> left, right;
    for (auto s : samples) {
      (data_.at(s, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right)
          .push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.weighted_decrease = static_cast<double>(node.samples) / root_samples_ * split.gain;
    nodes_[static_cast<std::size_t>(index)] = node;

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    nodes_[static_cast<std::size_t>(index)].left = l;
    nodes_[static_cast<std::size_t>(index)].right = r;
    return index;
  }

  const TrainingView& data_;
  const TreeParams& params_;
  Rng& rng_;
  double root_samples_;
  std::size_t n_candidates_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree train_tree(const TrainingView& data, std::span<const std::size_t> samples,
                        const TreeParams& params, Rng& rng) {
  if (samples.empty()) throw std::invalid_argument("cannot grow a tree on zero samples");
  TreeBuilder builder(data, params, rng, static_cast<double>(samples.size()));
  auto nodes = builder.build(std::vector<std::size_t>(samples.begin(), samples.end()));
  return DecisionTree(std::move(nodes), data.cols, data.n_classes);
}

DecisionTree train_tree(const TrainingView& data, const TreeParams& params, Rng& rng) {
  std::vector<std::size_t> all(data.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return train_tree(data, all, params, rng);
}

}  // namespace cebread::models
