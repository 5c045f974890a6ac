#include "cebread/features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cebread/csv.hpp"
#include "cebread/textproc.hpp"
#include "cebread/unicode.hpp"

namespace cebread {

namespace fs = std::filesystem;
using nlohmann::json;

double FeatureVector::at(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw FeatureError("feature '" + std::string(name) + "' not present");
}

namespace {

// Words grouped by sentence; sentences without any word are dropped.
struct Segmented {
  std::vector<std::vector<textproc::Token>> sentences;
  std::size_t word_count = 0;
};

Segmented segment(const Document& doc) {
  Segmented s;
  for (const auto& sentence : textproc::split_sentences(doc.text)) {
    auto tokens = textproc::tokenize(sentence);
    if (tokens.empty()) continue;
    s.word_count += tokens.size();
    s.sentences.push_back(std::move(tokens));
  }
  if (s.word_count == 0) {
    throw FeatureError("empty document: '" + doc.id + "' contains no words");
  }
  return s;
}

}  // namespace

FeatureVector trad_features(const Document& doc) {
  const Segmented seg = segment(doc);
  std::set<std::string> unique;
  std::size_t letters = 0, syllables = 0, polysyllables = 0;
  for (const auto& sentence : seg.sentences) {
    for (const auto& tok : sentence) {
      unique.insert(tok.surface);
      letters += tok.letters;
      const std::size_t n = textproc::syllable_count(tok);
      syllables += n;
      if (n >= 3) ++polysyllables;
    }
  }
  const auto words = static_cast<double>(seg.word_count);
  const auto sentences = static_cast<double>(seg.sentences.size());
  return FeatureVector{trad_feature_names(),
                       {static_cast<double>(unique.size()), words, letters / words,
                        syllables / words, sentences, words / sentences,
                        static_cast<double>(polysyllables)}};
}

FeatureVector syll_features(const Document& doc) {
  const Segmented seg = segment(doc);
  std::array<std::size_t, kSyllablePatterns.size()> pattern_counts{};
  std::size_t clusters = 0;
  for (const auto& sentence : seg.sentences) {
    for (const auto& tok : sentence) {
      for (const auto& syl : textproc::syllabify(tok.skeleton).syllables) {
        for (std::size_t p = 0; p < kSyllablePatterns.size(); ++p) {
          if (syl.str() == kSyllablePatterns[p]) {
            ++pattern_counts[p];
            break;
          }
        }
      }
      for (std::size_t run : textproc::consonant_runs(tok.skeleton)) clusters += run >= 2;
    }
  }
  const auto words = static_cast<double>(seg.word_count);
  FeatureVector fv{syll_feature_names(), {}};
  for (std::size_t c : pattern_counts) fv.values.push_back(c / words);
  fv.values.push_back(clusters / words);
  return fv;
}

std::string FeatureSets::name() const {
  if (trad && syll && neural) return "Combination";
  std::string out;
  auto add = [&](bool on, const char* n) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += n;
  };
  add(trad, "TRAD");
  add(syll, "SYLL");
  add(neural, "NEURAL");
  return out;
}

FeatureSets parse_feature_sets(std::string_view text) {
  FeatureSets sets;
  std::string lowered = unicode::to_lower(text);
  std::stringstream ss(lowered);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // Also accept "trad+syll".
    std::stringstream inner(item);
    std::string part;
    while (std::getline(inner, part, '+')) {
      part = unicode::trim(part);
      if (part == "trad") {
        sets.trad = true;
      } else if (part == "syll") {
        sets.syll = true;
      } else if (part == "neural") {
        sets.neural = true;
      } else if (part == "combination" || part == "all") {
        sets = {true, true, true};
      } else if (!part.empty()) {
        throw FeatureError("unknown feature set '" + part + "' (expected trad, syll, neural)");
      }
    }
  }
  if (sets.empty()) throw FeatureError("no feature set selected");
  return sets;
}

std::vector<FeatureSets> ablation_feature_sets() {
  return {{true, false, false},
          {false, true, false},
          {true, true, false},
          {false, false, true},
          {true, true, true}};
}

void EmbeddingStore::insert(std::string id, std::vector<double> vector) {
  if (vector.empty()) throw FeatureError("embedding for '" + id + "' is empty");
  if (dim_ && *dim_ != vector.size()) {
    throw FeatureError("embedding dimension mismatch for '" + id + "': expected " +
                       std::to_string(*dim_) + ", got " + std::to_string(vector.size()));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw FeatureError("embedding for '" + id + "' has a non-finite value");
  }
  if (vectors_.contains(id)) throw FeatureError("duplicate embedding id '" + id + "'");
  dim_ = vector.size();
  vectors_.emplace(std::move(id), std::move(vector));
}

const std::vector<double>& EmbeddingStore::at(const std::string& id) const {
  auto it = vectors_.find(id);
  if (it == vectors_.end()) throw FeatureError("missing embedding for document '" + id + "'");
  return it->second;
}

EmbeddingStore parse_embeddings(std::string_view content) {
  EmbeddingStore store;
  std::optional<std::size_t> declared_dim;
  std::size_t line_no = 0;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (unicode::trim(line).empty()) continue;
    const std::string where = "embeddings line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FeatureError(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw FeatureError(where + ": record is not an object");
    if (!obj.contains("id")) {
      if (store.size() == 0 && !declared_dim && obj.contains("dim") &&
          obj["dim"].is_number_unsigned()) {
        declared_dim = obj["dim"].get<std::size_t>();
        continue;
      }
      throw FeatureError(where + ": record has no \"id\"");
    }
    if (!obj["id"].is_string()) throw FeatureError(where + ": \"id\" must be a string");
    if (!obj.contains("vector") || !obj["vector"].is_array()) {
      throw FeatureError(where + ": record has no \"vector\" array");
    }
    std::vector<double> vec;
    vec.reserve(obj["vector"].size());
    for (const auto& v : obj["vector"]) {
      if (!v.is_number()) throw FeatureError(where + ": vector entries must be numbers");
      vec.push_back(v.get<double>());
    }
    if (declared_dim && vec.size() != *declared_dim) {
      throw FeatureError(where + ": dimension mismatch with header, expected " +
                         std::to_string(*declared_dim) + ", got " + std::to_string(vec.size()));
    }
    try {
      store.insert(obj["id"].get<std::string>(), std::move(vec));
    } catch (const FeatureError& e) {
      throw FeatureError(where + ": " + e.what());
    }
  }
  return store;
}

EmbeddingStore load_embeddings(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FeatureError("cannot open embeddings file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_embeddings(ss.str());
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> doc_ids, std::vector<std::string> schema,
                             std::vector<double> values, std::vector<Label> labels)
    : doc_ids_(std::move(doc_ids)),
      schema_(std::move(schema)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
  if (labels_.size() != doc_ids_.size() || values_.size() != doc_ids_.size() * schema_.size()) {
    throw FeatureError("feature matrix shape mismatch");
  }
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = (*this)(r, c);
  return out;
}

FeatureVector FeatureMatrix::row_vector(std::size_t i) const {
  auto r = row(i);
  return FeatureVector{schema_, std::vector<double>(r.begin(), r.end())};
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  std::vector<std::string> ids;
  std::vector<Label> labels;
  std::vector<double> values;
  ids.reserve(indices.size());
  labels.reserve(indices.size());
  values.reserve(indices.size() * cols());
  for (std::size_t i : indices) {
    ids.push_back(doc_ids_[i]);
    labels.push_back(labels_[i]);
    auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return FeatureMatrix(std::move(ids), schema_, std::move(values), std::move(labels));
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> indices) const {
  std::vector<std::string> schema;
  for (std::size_t c : indices) schema.push_back(schema_[c]);
  std::vector<double> values;
  values.reserve(rows() * indices.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c : indices) values.push_back((*this)(r, c));
  }
  return FeatureMatrix(doc_ids_, std::move(schema), std::move(values), labels_);
}

std::string neural_feature_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "neural_%03zu", i);
  return buf;
}

FeatureMatrix assemble(const Corpus& corpus, const FeatureSets& sets,
                       const EmbeddingStore* embeddings) {
  if (sets.empty()) throw FeatureError("no feature set selected");
  std::size_t neural_dim = 0;
  if (sets.neural) {
    if (embeddings == nullptr) throw FeatureError("NEURAL features requested without embeddings");
    for (const auto& d : corpus.documents()) embeddings->at(d.id);
    if (!embeddings->dim()) {
      throw FeatureError("missing embedding: embedding store is empty");
    }
    neural_dim = *embeddings->dim();
  }

  std::vector<std::string> schema;
  if (sets.trad) schema.insert(schema.end(), trad_feature_names().begin(), trad_feature_names().end());
  if (sets.syll) schema.insert(schema.end(), syll_feature_names().begin(), syll_feature_names().end());
  for (std::size_t i = 0; i < neural_dim; ++i) schema.push_back(neural_feature_name(i));

  std::vector<std::string> ids;
  std::vector<Label> labels;
  std::vector<double> values;
  values.reserve(corpus.size() * schema.size());
  for (const auto& doc : corpus.documents()) {
    ids.push_back(doc.id);
    labels.push_back(doc.label);
    if (sets.trad) {
      auto fv = trad_features(doc);
      values.insert(values.end(), fv.values.begin(), fv.values.end());
    }
    if (sets.syll) {
      auto fv = syll_features(doc);
      values.insert(values.end(), fv.values.begin(), fv.values.end());
    }
    if (sets.neural) {
      const auto& v = embeddings->at(doc.id);
      values.insert(values.end(), v.begin(), v.end());
    }
  }
  return FeatureMatrix(std::move(ids), std::move(schema), std::move(values), std::move(labels));
}

StandardizationStats fit_standardization(const FeatureMatrix& matrix) {
  StandardizationStats stats{matrix.schema(), std::vector<double>(matrix.cols(), 0.0),
                             std::vector<double>(matrix.cols(), 0.0)};
  const std::size_t n = matrix.rows();
  if (n == 0) return stats;
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += matrix(r, c);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = matrix(r, c) - mean;
      sq += d * d;
    }
    stats.mean[c] = mean;
    stats.stddev[c] = std::sqrt(sq / static_cast<double>(n));
  }
  return stats;
}

void apply_standardization(const StandardizationStats& stats, std::span<double> row) {
  if (row.size() != stats.mean.size()) throw FeatureError("standardization width mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) {
    // Relative threshold: a column that is constant up to rounding is constant.
    const double tol = 1e-12 * std::max(1.0, std::abs(stats.mean[c]));
    row[c] = stats.stddev[c] > tol ? (row[c] - stats.mean[c]) / stats.stddev[c] : 0.0;
  }
}

Standardized standardize(const FeatureMatrix& matrix,
                         const std::optional<StandardizationStats>& stats) {
  if (stats && stats->schema != matrix.schema()) {
    throw FeatureError("standardization stats were fit on a different schema");
  }
  Standardized out{matrix, stats ? *stats : fit_standardization(matrix)};
  for (std::size_t r = 0; r < out.matrix.rows(); ++r) {
    apply_standardization(out.stats, out.matrix.row(r));
  }
  return out;
}

void write_feature_csv(std::ostream& os, const FeatureMatrix& matrix) {
  csv::Row header{"id", "label"};
  header.insert(header.end(), matrix.schema().begin(), matrix.schema().end());
  csv::write_row(os, header);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    csv::Row row{matrix.doc_ids()[r], std::to_string(matrix.labels()[r])};
    for (double v : matrix.row(r)) row.push_back(csv::format_number(v));
    csv::write_row(os, row);
  }
}

}  // namespace cebread
