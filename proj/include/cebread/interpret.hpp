#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cebread/features.hpp"
#include "cebread/model.hpp"

namespace cebread {

struct PermutationScore {
  std::string feature;
  double mean_drop = 0.0;  // baseline accuracy minus permuted accuracy
  double stddev = 0.0;     // population, over repeats
};

struct PermutationResult {
  double baseline_accuracy = 0.0;
  std::vector<PermutationScore> features;  // schema order
};

// Shuffles one column at a time, `repeats` fresh permutations each, against
// an already trained model. Column f draws from Rng(derive_seed(seed, f)).
PermutationResult permutation_importance(const TrainedModel& model, const FeatureMatrix& matrix,
                                         std::size_t repeats, std::uint64_t seed);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// 0 with degenerate = true when either side has zero variance.
struct Correlation {
  std::string feature;
  double rho = 0.0;
  bool degenerate = false;
};

double pearson(std::span<const double> x, std::span<const double> y, bool* degenerate = nullptr);
double spearman(std::span<const double> x, std::span<const double> y, bool* degenerate = nullptr);

// Spearman rho of every column against the labels, sorted by |rho|
// descending (schema order among equals).
std::vector<Correlation> spearman_ranking(const FeatureMatrix& matrix);

// "TRAD", "SYLL" or "NEURAL" for a schema name.
std::string feature_group(std::string_view feature);

}  // namespace cebread
