#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cebread::textproc {

enum class Unit : char { consonant = 'C', vowel = 'V' };

// A word rewritten over {C, V}; one unit per phoneme (the digraph "ng" is a
// single C).
class CvSkeleton {
public:
  CvSkeleton() = default;
  // Accepts "CVC"-style strings; throws std::invalid_argument otherwise.
  explicit CvSkeleton(std::string_view units);

  const std::string& str() const { return units_; }
  std::size_t size() const { return units_.size(); }
  bool empty() const { return units_.empty(); }
  Unit operator[](std::size_t i) const { return static_cast<Unit>(units_[i]); }
  std::size_t vowel_count() const;

  void push_back(Unit u) { units_.push_back(static_cast<char>(u)); }
  CvSkeleton slice(std::size_t pos, std::size_t len) const;

  bool operator==(const CvSkeleton&) const = default;

private:
  std::string units_;
};

struct SyllableSegmentation {
  std::vector<CvSkeleton> syllables;
};

struct Token {
  std::string surface;  // lowercase
  CvSkeleton skeleton;
  std::size_t letters = 0;  // letter count, hyphens/apostrophes/marks excluded
};

std::vector<std::string> split_sentences(std::string_view text);
std::vector<Token> tokenize(std::string_view sentence);

CvSkeleton to_skeleton(std::string_view word);

// The letters behind each skeleton unit ("ngano" -> ng, a, n, o).
std::vector<std::string> phoneme_units(std::string_view word);

// Maximal onset: one consonant between two nuclei starts the next syllable,
// the rest close the previous one. Adjacent vowels are separate nuclei.
SyllableSegmentation syllabify(const CvSkeleton& skeleton);

std::size_t syllable_count(const Token& token);

// Lengths of maximal consonant runs in the skeleton, left to right.
std::vector<std::size_t> consonant_runs(const CvSkeleton& skeleton);

}  // namespace cebread::textproc
