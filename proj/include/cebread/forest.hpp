#pragma once

#include <cstdint>
#include <vector>

#include "cebread/tree.hpp"

namespace cebread::models {

struct ForestParams {
  std::size_t n_estimators = 100;
  MaxFeatures max_features = MaxFeatures::sqrt;
  std::optional<std::size_t> max_depth;
  std::uint64_t seed = 0;
};

class RandomForest {
public:
  RandomForest() = default;
  RandomForest(std::vector<DecisionTree> trees, std::size_t n_features, std::size_t n_classes);

  const std::vector<DecisionTree>& trees() const { return trees_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return n_classes_; }

  std::vector<std::size_t> votes(std::span<const double> x) const;
  // Majority vote; ties go to the lowest class index.
  int predict(std::span<const double> x) const;

  // Mean over trees of per-feature weighted Gini decrease, normalized to sum
  // to one. All zeros when no tree has a split.
  std::vector<double> mdi_importance() const;

private:
  std::vector<DecisionTree> trees_;
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
};

// Tree t sees a bootstrap sample drawn from Rng(derive_seed(seed, t)), so the
// result is the same for any `jobs`.
RandomForest train_forest(const TrainingView& data, const ForestParams& params,
                          std::size_t jobs = 1);

// Bootstrap indices used for tree t; exposed for out-of-bag checks.
std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng);

}  // namespace cebread::models
