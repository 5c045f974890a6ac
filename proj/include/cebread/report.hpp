#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cebread/interpret.hpp"
#include "cebread/validation.hpp"

namespace cebread {

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const CvResult& r);
nlohmann::json to_json(const GridResult& g);
nlohmann::json to_json(const AblationTable& t);
nlohmann::json to_json(const FoldAssignment& f);
nlohmann::json to_json(const PermutationResult& p);
nlohmann::json to_json(const std::vector<Correlation>& c);

// Tables in the layout of the classic per-model ablation tables:
// one block per model, one row per feature set, Acc/Prec/Rec/F1 columns.
std::string format_ablation_table(const AblationTable& table);

// Top-n correlation table with a feature-set column.
std::string format_correlation_table(const std::vector<Correlation>& ranking, std::size_t top_n);

// "feature,<value columns>" CSVs for external plotting.
std::string importance_csv(const FeatureVector& mdi);
std::string permutation_csv(const PermutationResult& p);
std::string correlation_csv(const std::vector<Correlation>& c);

}  // namespace cebread
