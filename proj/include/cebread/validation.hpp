#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cebread/corpus.hpp"
#include "cebread/features.hpp"
#include "cebread/metrics.hpp"
#include "cebread/model.hpp"

namespace cebread {

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population, over folds
};

struct CvResult {
  std::string feature_set;
  Hyperparameters hp;
  std::vector<Metrics> folds;
  MetricSummary accuracy;
  MetricSummary macro_precision;
  MetricSummary macro_recall;
  MetricSummary macro_f1;
};

CvResult summarize(std::string feature_set, Hyperparameters hp, std::vector<Metrics> folds);

// For each fold, trains on the other folds (standardization is fit inside
// train(), on those rows only) and scores the held-out fold.
CvResult cross_validate(const FeatureMatrix& matrix, const FoldAssignment& folds,
                        const Hyperparameters& hp, std::string feature_set = {},
                        std::size_t jobs = 1);

// Row indices of `matrix` per fold; throws when an id has no fold.
std::vector<std::vector<std::size_t>> fold_rows(const FeatureMatrix& matrix,
                                                const FoldAssignment& folds);

// Candidate values per hyperparameter, expanded as a Cartesian product with
// the first axis varying slowest. `fixed` is applied to every point, e.g.
// "seed=7".
struct GridSpec {
  ModelKind kind = ModelKind::rforest;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string fixed;

  std::vector<Hyperparameters> expand() const;
};

GridSpec default_grid(ModelKind kind);

// Parses "key=v1|v2|v3;key2=..." into axes, replacing same-named axes of base.
GridSpec override_grid(GridSpec base, std::string_view text);

struct GridResult {
  std::vector<CvResult> results;  // grid order
  std::size_t best = 0;

  const CvResult& best_result() const { return results.at(best); }
};

// Best = highest mean macro-F1, then higher mean accuracy, then grid order.
GridResult grid_search(const FeatureMatrix& matrix, const FoldAssignment& folds,
                       const GridSpec& grid, std::string feature_set = {}, std::size_t jobs = 1);

struct AblationCell {
  FeatureSets sets;
  ModelKind kind;
  std::optional<GridResult> result;
  std::string skipped;  // reason, when result is empty
};

struct AblationTable {
  std::vector<AblationCell> cells;  // feature set major, model minor
};

struct AblationRequest {
  std::vector<FeatureSets> feature_sets = ablation_feature_sets();
  std::vector<ModelKind> kinds{kAllModelKinds.begin(), kAllModelKinds.end()};
  std::map<ModelKind, GridSpec> grids;  // default_grid(kind) when absent
  std::size_t jobs = 1;
};

// Rows needing NEURAL features are skipped (with a reason) when no
// embeddings are supplied.
AblationTable run_ablations(const Corpus& corpus, const EmbeddingStore* embeddings,
                            const FoldAssignment& folds, const AblationRequest& request);

}  // namespace cebread
