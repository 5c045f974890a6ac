#include "cebread/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cebread/csv.hpp"
#include "cebread/rng.hpp"
#include "cebread/unicode.hpp"

namespace cebread {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string line_tag(std::size_t line) { return "line " + std::to_string(line); }

Label parse_label_text(std::string_view s, const std::string& where) {
  std::string t = unicode::trim(s);
  if (!t.empty() && (t[0] == 'L' || t[0] == 'l')) t.erase(0, 1);
  if (t.size() == 1 && t[0] >= '0' && t[0] <= '9') {
    Label l = t[0] - '0';
    if (is_valid_label(l)) return l;
  }
  throw CorpusError(where + ": label '" + std::string(s) + "' is outside {1,2,3}");
}

Label parse_label_json(const json& v, const std::string& where) {
  if (v.is_number_integer()) {
    auto l = v.get<long long>();
    if (l < 1 || l > 3) {
      throw CorpusError(where + ": label " + std::to_string(l) + " is outside {1,2,3}");
    }
    return static_cast<Label>(l);
  }
  if (v.is_string()) return parse_label_text(v.get<std::string>(), where);
  throw CorpusError(where + ": label must be an integer in {1,2,3}");
}

Document make_document(std::string id, std::string_view text, Label label,
                       std::optional<std::string> source, const std::string& where) {
  Document doc{std::move(id), unicode::nfc(text), label, std::move(source)};
  validate_document(doc, where);
  return doc;
}

class DuplicateGuard {
public:
  void check(const std::string& id, const std::string& where) {
    auto [it, inserted] = seen_.emplace(id, where);
    if (!inserted) {
      throw CorpusError(where + ": duplicate id '" + id + "' (first seen at " + it->second + ")");
    }
  }

private:
  std::unordered_map<std::string, std::string> seen_;
};

}  // namespace

void validate_document(const Document& doc, const std::string& where) {
  if (doc.id.empty()) throw CorpusError(where + ": empty document id");
  if (!is_valid_label(doc.label)) {
    throw CorpusError(where + ": label " + std::to_string(doc.label) + " is outside {1,2,3}");
  }
  if (unicode::trim(doc.text).empty()) {
    throw CorpusError(where + ": document '" + doc.id + "' has empty text");
  }
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  DuplicateGuard guard;
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    std::string where = "document " + std::to_string(i + 1);
    validate_document(documents_[i], where);
    guard.check(documents_[i].id, where);
  }
}

std::map<Label, std::size_t> Corpus::label_counts() const {
  std::map<Label, std::size_t> counts;
  for (const auto& d : documents_) ++counts[d.label];
  return counts;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl" || name == "json") return CorpusFormat::jsonl;
  if (name == "csv") return CorpusFormat::csv;
  if (name == "directory" || name == "dir" || name == "directory-tree") return CorpusFormat::directory;
  throw CorpusError("unknown corpus format '" + std::string(name) +
                    "' (expected jsonl, csv or directory)");
}

CorpusFormat guess_corpus_format(const fs::path& path) {
  if (fs::is_directory(path)) return CorpusFormat::directory;
  if (path.extension() == ".csv") return CorpusFormat::csv;
  return CorpusFormat::jsonl;
}

Corpus parse_jsonl_corpus(std::string_view content) {
  std::vector<Document> docs;
  DuplicateGuard guard;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (unicode::trim(line).empty()) {
      if (nl == content.size()) break;
      continue;
    }
    const std::string where = line_tag(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusError(where + ": malformed JSON record (" + e.what() + ")");
    }
    if (!obj.is_object()) throw CorpusError(where + ": record is not a JSON object");
    if (!obj.contains("id") || !obj.contains("text") || !obj.contains("label")) {
      throw CorpusError(where + ": record needs \"id\", \"text\" and \"label\"");
    }
    std::string id;
    if (obj["id"].is_string()) {
      id = obj["id"].get<std::string>();
    } else if (obj["id"].is_number_integer()) {
      id = std::to_string(obj["id"].get<long long>());
    } else {
      throw CorpusError(where + ": \"id\" must be a string");
    }
    if (!obj["text"].is_string()) throw CorpusError(where + ": \"text\" must be a string");
    std::optional<std::string> source;
    if (obj.contains("source") && !obj["source"].is_null()) {
      if (!obj["source"].is_string()) throw CorpusError(where + ": \"source\" must be a string");
      source = obj["source"].get<std::string>();
    }
    Label label = parse_label_json(obj["label"], where);
    docs.push_back(make_document(std::move(id), obj["text"].get<std::string>(), label,
                                 std::move(source), where));
    guard.check(docs.back().id, where);
    if (nl == content.size()) break;
  }
  return Corpus(std::move(docs));
}

Corpus parse_csv_corpus(std::string_view content) {
  std::vector<csv::ParsedRow> rows;
  try {
    rows = csv::parse(content);
  } catch (const std::runtime_error& e) {
    throw CorpusError(std::string("malformed CSV: ") + e.what());
  }
  if (rows.empty()) return Corpus{};
  const csv::Row& header = rows.front().fields;
  auto column = [&](std::string_view name, bool required) -> std::ptrdiff_t {
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const std::string& h) { return unicode::trim(h) == name; });
    if (it == header.end()) {
      if (required) throw CorpusError("CSV header is missing column '" + std::string(name) + "'");
      return -1;
    }
    return it - header.begin();
  };
  const auto id_col = column("id", true);
  const auto text_col = column("text", true);
  const auto label_col = column("label", true);
  const auto source_col = column("source", false);

  std::vector<Document> docs;
  DuplicateGuard guard;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = line_tag(row.line);
    if (row.fields.size() != header.size()) {
      throw CorpusError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(row.fields.size()));
    }
    std::optional<std::string> source;
    if (source_col >= 0 && !row.fields[source_col].empty()) source = row.fields[source_col];
    Label label = parse_label_text(row.fields[label_col], where);
    docs.push_back(make_document(row.fields[id_col], row.fields[text_col], label,
                                 std::move(source), where));
    guard.check(docs.back().id, where);
  }
  return Corpus(std::move(docs));
}

namespace {

Corpus load_directory(const fs::path& root) {
  // Label directories are named "1".."3" or "L1".."L3"; anything else is an
  // error rather than silently ignored.
  std::vector<std::pair<Label, fs::path>> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    dirs.emplace_back(parse_label_text(name, entry.path().string()), entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<Document> docs;
  for (const auto& [label, dir] : dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      docs.push_back(make_document(f.stem().string(), read_file(f), label, std::nullopt,
                                   f.string()));
    }
  }
  return Corpus(std::move(docs));
}

}  // namespace

Corpus load_corpus(const fs::path& path, CorpusFormat format) {
  if (!fs::exists(path)) throw CorpusError("corpus not found: " + path.string());
  switch (format) {
    case CorpusFormat::jsonl:
      return parse_jsonl_corpus(read_file(path));
    case CorpusFormat::csv:
      return parse_csv_corpus(read_file(path));
    case CorpusFormat::directory:
      if (!fs::is_directory(path)) throw CorpusError(path.string() + " is not a directory");
      return load_directory(path);
  }
  throw CorpusError("unsupported corpus format");
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents()) {
    json obj = {{"id", d.id}, {"text", d.text}, {"label", d.label}};
    obj["source"] = d.source ? json(*d.source) : json(nullptr);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write corpus file: " + path.string());
  out << to_jsonl(corpus);
}

FoldAssignment::FoldAssignment(std::size_t k, std::vector<std::string> ids,
                               std::vector<std::size_t> folds)
    : k_(k), ids_(std::move(ids)), folds_(std::move(folds)) {
  if (ids_.size() != folds_.size()) throw EvalError("fold assignment size mismatch");
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (folds_[i] >= k_) throw EvalError("fold index out of range for '" + ids_[i] + "'");
    if (!index_.emplace(ids_[i], i).second) {
      throw EvalError("fold assignment lists '" + ids_[i] + "' twice");
    }
  }
}

std::size_t FoldAssignment::fold_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw EvalError("document '" + id + "' has no fold assignment");
  return folds_[it->second];
}

namespace {

void check_fold_args(const Corpus& corpus, std::size_t k) {
  if (k < 2) throw EvalError("k must be at least 2 (got " + std::to_string(k) + ")");
  if (corpus.empty()) throw EvalError("cannot build folds for an empty corpus");
}

std::vector<std::string> corpus_ids(const Corpus& corpus) {
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& d : corpus.documents()) ids.push_back(d.id);
  return ids;
}

}  // namespace

FoldAssignment stratified_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  check_fold_args(corpus, k);
  std::vector<std::size_t> folds(corpus.size(), 0);
  std::vector<std::string> warnings;
  // Continuing the round-robin counter across labels keeps overall fold sizes
  // balanced too.
  std::size_t cursor = 0;
  for (auto [label, count] : corpus.label_counts()) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus[i].label == label) members.push_back(i);
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(members);
    for (std::size_t idx : members) folds[idx] = cursor++ % k;
    if (count < k) {
      warnings.push_back("label " + std::to_string(label) + " has only " + std::to_string(count) +
                         " documents for " + std::to_string(k) + " folds");
    }
  }
  FoldAssignment fa(k, corpus_ids(corpus), std::move(folds));
  fa.warnings = std::move(warnings);
  return fa;
}

FoldAssignment plain_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  check_fold_args(corpus, k);
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "plain-folds"));
  rng.shuffle(order);
  std::vector<std::size_t> folds(corpus.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) folds[order[pos]] = pos % k;
  FoldAssignment fa(k, corpus_ids(corpus), std::move(folds));
  if (corpus.size() < k) {
    fa.warnings.push_back("corpus has fewer documents than folds; some folds are empty");
  }
  return fa;
}

}  // namespace cebread
