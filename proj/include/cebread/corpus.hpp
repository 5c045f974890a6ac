#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cebread/error.hpp"

namespace cebread {

// Grade levels L1..L3. Class order is fixed everywhere and ties break to the
// lowest label.
using Label = int;
inline constexpr std::array<Label, 3> kLabels{1, 2, 3};
inline constexpr bool is_valid_label(Label l) { return l >= 1 && l <= 3; }

struct Document {
  std::string id;
  std::string text;  // NFC-normalized
  Label label = 0;
  std::optional<std::string> source;

  bool operator==(const Document&) const = default;
};

class Corpus {
public:
  Corpus() = default;
  // Validates every document and rejects duplicate ids.
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  // Count per label, keyed by label value; labels with no documents omitted.
  std::map<Label, std::size_t> label_counts() const;

  bool operator==(const Corpus&) const = default;

private:
  std::vector<Document> documents_;
};

enum class CorpusFormat { jsonl, csv, directory };

CorpusFormat parse_corpus_format(std::string_view name);
// jsonl for *.jsonl / *.json, csv for *.csv, directory for directories.
CorpusFormat guess_corpus_format(const std::filesystem::path& path);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus parse_jsonl_corpus(std::string_view content);
Corpus parse_csv_corpus(std::string_view content);

// Canonical JSONL serialization; load_corpus(jsonl) reads it back unchanged.
std::string to_jsonl(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Throws CorpusError naming `where` when the document breaks an invariant.
void validate_document(const Document& doc, const std::string& where);

class FoldAssignment {
public:
  FoldAssignment(std::size_t k, std::vector<std::string> ids, std::vector<std::size_t> folds);

  std::size_t k() const { return k_; }
  // Ids in corpus order, with their fold index.
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::size_t>& folds() const { return folds_; }

  std::size_t fold_of(const std::string& id) const;  // throws if unknown
  bool contains(const std::string& id) const { return index_.contains(id); }

  // Non-fatal notes produced while building the assignment.
  std::vector<std::string> warnings;

  bool operator==(const FoldAssignment& o) const {
    return k_ == o.k_ && ids_ == o.ids_ && folds_ == o.folds_;
  }

private:
  std::size_t k_;
  std::vector<std::string> ids_;
  std::vector<std::size_t> folds_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Per-label shuffled round-robin. For every label, fold sizes differ by at
// most one; overall fold sizes differ by at most one as well.
FoldAssignment stratified_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed);
// Unstratified shuffle, for sensitivity checks.
FoldAssignment plain_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed);

}  // namespace cebread
