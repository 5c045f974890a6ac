#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cebread/features.hpp"
#include "cebread/forest.hpp"
#include "cebread/logreg.hpp"
#include "cebread/svm.hpp"

namespace cebread {

enum class ModelKind { logreg, svm, rforest };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
inline constexpr std::array<ModelKind, 3> kAllModelKinds{ModelKind::logreg, ModelKind::svm,
                                                         ModelKind::rforest};

class Hyperparameters {
public:
  using Params = std::variant<models::LogRegParams, models::SvmParams, models::ForestParams>;

  Hyperparameters(models::LogRegParams p) : params_(p) {}
  Hyperparameters(models::SvmParams p) : params_(p) {}
  Hyperparameters(models::ForestParams p) : params_(p) {}

  ModelKind kind() const { return static_cast<ModelKind>(params_.index()); }
  const Params& params() const { return params_; }
  template <typename T>
  const T& get() const { return std::get<T>(params_); }

  // Throws ModelError when a value is outside its allowed range.
  void validate() const;
  // Compact "key=value,..." form for reports.
  std::string describe() const;

private:
  Params params_;
};

nlohmann::json to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const nlohmann::json& j);

// Applies "key=value,..." overrides on top of `base`.
//   logreg:  penalty=l1|l2 C=<x> solver=gd|proximal max_iter=<n>
//   svm:     kernel=linear|rbf C=<x> gamma=<x> max_iter=<n>
//   rforest: n_estimators=<n> max_features=sqrt|log2|all max_depth=<n>|none seed=<n>
Hyperparameters parse_hyperparameters(ModelKind kind, std::string_view text);
Hyperparameters default_hyperparameters(ModelKind kind);

class TrainedModel {
public:
  using Fitted = std::variant<models::LogisticRegression, models::Svm, models::RandomForest>;

  TrainedModel(Hyperparameters hp, std::vector<std::string> schema, std::vector<Label> classes,
               std::optional<StandardizationStats> stats, Fitted fitted);

  ModelKind kind() const { return hp_.kind(); }
  const Hyperparameters& hyperparameters() const { return hp_; }
  const std::vector<std::string>& schema() const { return schema_; }
  const std::vector<Label>& classes() const { return classes_; }
  const std::optional<StandardizationStats>& standardization() const { return stats_; }
  const Fitted& fitted() const { return fitted_; }

  // Row in schema order, raw (unstandardized) values.
  Label predict_row(std::span<const double> row) const;

  bool operator==(const TrainedModel& o) const;

private:
  Hyperparameters hp_;
  std::vector<std::string> schema_;
  std::vector<Label> classes_;
  std::optional<StandardizationStats> stats_;
  Fitted fitted_;
};

struct TrainOptions {
  std::size_t jobs = 1;
};

// Linear models standardize with statistics fit on `matrix`; the forest uses
// raw values. Throws ModelError for a single-class set or non-finite values.
TrainedModel train(const FeatureMatrix& matrix, const Hyperparameters& hp,
                   const TrainOptions& options = {});

Label predict(const TrainedModel& model, const FeatureVector& x);
std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& matrix);

// Throws ModelError for non-forest models.
FeatureVector mdi_importance(const TrainedModel& model);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace cebread
