#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "cebread/corpus.hpp"
#include "cebread/features.hpp"
#include "cebread/rng.hpp"

namespace cebread::testing {

class TempDir {
public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cebread-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Matrix from explicit columns of values (row-major input).
inline FeatureMatrix make_matrix(const std::vector<std::vector<double>>& rows,
                                 const std::vector<Label>& labels,
                                 std::vector<std::string> schema = {}) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  if (schema.empty()) {
    for (std::size_t c = 0; c < cols; ++c) schema.push_back("f" + std::to_string(c));
  }
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ids.push_back("r" + std::to_string(r));
    values.insert(values.end(), rows[r].begin(), rows[r].end());
  }
  return FeatureMatrix(std::move(ids), std::move(schema), std::move(values), labels);
}

// Pseudo-words built from Cebuano-like letters, including "ng", clusters and
// vowel sequences.
inline std::string random_word(Rng& rng) {
  static const std::vector<std::string> onsets{"",  "b",  "k",  "d",  "g",  "h",  "l",
                                               "m", "n",  "ng", "p",  "s",  "t",  "w",
                                               "y", "pl", "tr", "bl", "gr", "sy", "ts"};
  static const std::vector<std::string> vowels{"a", "e", "i", "o", "u"};
  static const std::vector<std::string> codas{"", "", "", "n", "ng", "y", "w", "s", "t", "k", "l"};
  std::string w;
  const auto syllables = 1 + rng.below(4);
  for (std::uint64_t s = 0; s < syllables; ++s) {
    w += onsets[rng.below(onsets.size())];
    w += vowels[rng.below(vowels.size())];
    if (rng.below(3) == 0) w += codas[rng.below(codas.size())];
  }
  return w;
}

// Synthetic document: several sentences of pseudo-words with varied case,
// punctuation, numbers and a hyphenated reduplication now and then.
inline std::string random_text(Rng& rng) {
  std::string text;
  const auto sentences = 1 + rng.below(5);
  for (std::uint64_t s = 0; s < sentences; ++s) {
    const auto words = 1 + rng.below(8);
    for (std::uint64_t w = 0; w < words; ++w) {
      std::string word = random_word(rng);
      if (rng.below(6) == 0) word += "-" + word;
      if (w == 0 && !word.empty()) word[0] = static_cast<char>(std::toupper(word[0]));
      if (rng.below(10) == 0) text += "12 ";
      text += word;
      text += rng.below(7) == 0 ? ", " : " ";
    }
    static const std::vector<std::string> ends{".", "!", "?", "...", "?!"};
    text.back() = ' ';
    text.pop_back();
    text += ends[rng.below(ends.size())];
    text += rng.below(4) == 0 ? "\n" : " ";
  }
  return text;
}

inline Corpus random_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back({"d" + std::to_string(i), random_text(rng), static_cast<Label>(1 + i % 3),
                    std::nullopt});
  }
  return Corpus(std::move(docs));
}

}  // namespace cebread::testing
