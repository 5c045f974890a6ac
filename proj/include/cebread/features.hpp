#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cebread/corpus.hpp"

namespace cebread {

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  // Throws FeatureError when the name is absent.
  double at(std::string_view name) const;
};

inline const std::vector<std::string>& trad_feature_names() {
  static const std::vector<std::string> names{
      "unique_words",   "word_count",           "average_word_len", "average_syllable_count",
      "sentence_count", "average_sentence_len", "polysyll_count"};
  return names;
}

inline const std::vector<std::string>& syll_feature_names() {
  static const std::vector<std::string> names{
      "v_density",   "cv_density",   "cc_density",   "vc_density",
      "cvc_density", "ccv_density", "ccvc_density", "consonant_cluster"};
  return names;
}

// The seven syllable shapes, in the same order as the density features.
inline constexpr std::array<std::string_view, 7> kSyllablePatterns{"V",   "CV",  "CC",  "VC",
                                                                   "CVC", "CCV", "CCVC"};

FeatureVector trad_features(const Document& doc);
FeatureVector syll_features(const Document& doc);

// Which groups to concatenate. Columns always come out TRAD, SYLL, NEURAL.
struct FeatureSets {
  bool trad = false;
  bool syll = false;
  bool neural = false;

  bool empty() const { return !trad && !syll && !neural; }
  // "TRAD", "TRAD+SYLL", ..., with TRAD+SYLL+NEURAL reported as "Combination".
  std::string name() const;
  bool operator==(const FeatureSets&) const = default;
};

// Accepts comma lists of trad/syll/neural, plus "combination" and "all".
FeatureSets parse_feature_sets(std::string_view text);

// The five rows of the ablation table, in reporting order.
std::vector<FeatureSets> ablation_feature_sets();

class EmbeddingStore {
public:
  EmbeddingStore() = default;

  // Throws FeatureError on dimension mismatch or non-finite values.
  void insert(std::string id, std::vector<double> vector);

  std::optional<std::size_t> dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& id) const { return vectors_.contains(id); }
  const std::vector<double>& at(const std::string& id) const;  // throws "missing embedding"

private:
  std::optional<std::size_t> dim_;
  std::map<std::string, std::vector<double>> vectors_;
};

// JSONL with one {"id","vector"} object per line. An optional leading metadata
// line {"dim":…,…} is validated against the records and skipped.
EmbeddingStore load_embeddings(const std::filesystem::path& path);
EmbeddingStore parse_embeddings(std::string_view content);

// Row-major, one row per document.
class FeatureMatrix {
public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> doc_ids, std::vector<std::string> schema,
                std::vector<double> values, std::vector<Label> labels);

  std::size_t rows() const { return doc_ids_.size(); }
  std::size_t cols() const { return schema_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<std::string>& schema() const { return schema_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols(), cols()}; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }

  std::vector<double> column(std::size_t c) const;
  FeatureVector row_vector(std::size_t i) const;

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
  FeatureMatrix select_columns(std::span<const std::size_t> indices) const;

private:
  std::vector<std::string> doc_ids_;
  std::vector<std::string> schema_;
  std::vector<double> values_;
  std::vector<Label> labels_;
};

FeatureMatrix assemble(const Corpus& corpus, const FeatureSets& sets,
                       const EmbeddingStore* embeddings = nullptr);

// Name of the i-th neural column.
std::string neural_feature_name(std::size_t i);

struct StandardizationStats {
  std::vector<std::string> schema;
  std::vector<double> mean;
  std::vector<double> stddev;  // population

  bool operator==(const StandardizationStats&) const = default;
};

StandardizationStats fit_standardization(const FeatureMatrix& matrix);
// (x - mean) / stddev; zero-variance columns map to 0.
void apply_standardization(const StandardizationStats& stats, std::span<double> row);

struct Standardized {
  FeatureMatrix matrix;
  StandardizationStats stats;
};

Standardized standardize(const FeatureMatrix& matrix,
                         const std::optional<StandardizationStats>& stats = std::nullopt);

// CSV with header id,label,<schema...>.
void write_feature_csv(std::ostream& os, const FeatureMatrix& matrix);

}  // namespace cebread
