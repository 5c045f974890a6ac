#include "cebread/forest.hpp"

#include <algorithm>
#include <stdexcept>

#include "cebread/parallel.hpp"

namespace cebread::models {

RandomForest::RandomForest(std::vector<DecisionTree> trees, std::size_t n_features,
                           std::size_t n_classes)
    : trees_(std::move(trees)), n_features_(n_features), n_classes_(n_classes) {}

std::vector<std::size_t> RandomForest::votes(std::span<const double> x) const {
  std::vector<std::size_t> v(n_classes_, 0);
  for (const auto& t : trees_) ++v[static_cast<std::size_t>(t.predict(x))];
  return v;
}

int RandomForest::predict(std::span<const double> x) const {
  const auto v = votes(x);
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<double> RandomForest::mdi_importance() const {
  std::vector<double> imp(n_features_, 0.0);
  if (trees_.empty()) return imp;
  for (const auto& t : trees_) {
    const auto ti = t.impurity_importance();
    for (std::size_t f = 0; f < n_features_; ++f) imp[f] += ti[f];
  }
  double total = 0.0;
  for (double& v : imp) {
    v /= static_cast<double>(trees_.size());
    total += v;
  }
  if (total > 0.0) {
    for (double& v : imp) v /= total;
  }
  return imp;
}

std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng) {
  std::vector<std::size_t> s(n);
  for (auto& i : s) i = static_cast<std::size_t>(rng.below(n));
  return s;
}

RandomForest train_forest(const TrainingView& data, const ForestParams& params, std::size_t jobs) {
  if (params.n_estimators == 0) throw std::invalid_argument("n_estimators must be at least 1");
  if (data.rows() == 0) throw std::invalid_argument("cannot train a forest on zero samples");
  const TreeParams tree_params{params.max_features, params.max_depth};
  std::vector<DecisionTree> trees(params.n_estimators);
  parallel_for(params.n_estimators, jobs, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    const auto samples = bootstrap_sample(data.rows(), rng);
    trees[t] = train_tree(data, samples, tree_params, rng);
  });
  return RandomForest(std::move(trees), data.cols, data.n_classes);
}

}  // namespace cebread::models
