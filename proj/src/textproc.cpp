#include "cebread/textproc.hpp"

#include <stdexcept>

#include "cebread/unicode.hpp"

namespace cebread::textproc {

namespace {

bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'…'; }

// Closing punctuation that stays with the sentence it follows.
bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'”' || c == U'’' ||
         c == U'»';
}

bool is_joiner(char32_t c) { return c == U'-' || c == U'\'' || c == U'’' || c == U'‐'; }

bool is_vowel_letter(char32_t c) {
  char32_t b = unicode::base_letter(c);
  return b == U'a' || b == U'e' || b == U'i' || b == U'o' || b == U'u';
}

bool has_content(std::u32string_view s) {
  for (char32_t c : s) {
    if (!unicode::is_space(c) && !is_terminator(c) && !is_closer(c)) return true;
  }
  return false;
}

}  // namespace

CvSkeleton::CvSkeleton(std::string_view units) : units_(units) {
  for (char c : units_) {
    if (c != 'C' && c != 'V') throw std::invalid_argument("CV skeleton may only contain C and V");
  }
}

std::size_t CvSkeleton::vowel_count() const {
  std::size_t n = 0;
  for (char c : units_) n += c == 'V';
  return n;
}

CvSkeleton CvSkeleton::slice(std::size_t pos, std::size_t len) const {
  CvSkeleton out;
  out.units_ = units_.substr(pos, len);
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  const std::u32string cps = unicode::decode(text);
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::u32string_view piece = std::u32string_view(cps).substr(start, end - start);
    if (has_content(piece)) sentences.push_back(unicode::trim(unicode::encode(piece)));
    start = end;
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_terminator(cps[i])) {
      ++i;
      continue;
    }
    while (i < cps.size() && is_terminator(cps[i])) ++i;
    while (i < cps.size() && is_closer(cps[i])) ++i;
    emit(i);
  }
  emit(cps.size());
  return sentences;
}

std::vector<Token> tokenize(std::string_view sentence) {
  const std::u32string cps = unicode::decode(unicode::to_lower(sentence));
  std::vector<Token> tokens;
  std::u32string current;
  std::size_t letters = 0;

  auto flush = [&] {
    if (letters > 0) {
      Token t;
      t.surface = unicode::encode(current);
      t.skeleton = to_skeleton(t.surface);
      t.letters = letters;
      tokens.push_back(std::move(t));
    }
    current.clear();
    letters = 0;
  };

  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i];
    if (unicode::is_letter(c)) {
      current.push_back(c);
      ++letters;
    } else if (unicode::is_mark(c) && letters > 0) {
      current.push_back(c);
    } else if (is_joiner(c) && letters > 0 && i + 1 < cps.size() &&
               unicode::is_letter(cps[i + 1]) && !is_joiner(current.back())) {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> phoneme_units(std::string_view word) {
  const std::u32string cps = unicode::decode(word);
  std::vector<std::string> units;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i];
    if (unicode::is_mark(c) && !units.empty()) {
      unicode::append_utf8(units.back(), c);
      continue;
    }
    if (!unicode::is_letter(c)) continue;
    std::string unit;
    unicode::append_utf8(unit, c);
    if (c == U'n' && i + 1 < cps.size() && cps[i + 1] == U'g') {
      unit += 'g';
      ++i;
    }
    units.push_back(std::move(unit));
  }
  return units;
}

CvSkeleton to_skeleton(std::string_view word) {
  const std::u32string cps = unicode::decode(word);
  CvSkeleton sk;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i];
    if (!unicode::is_letter(c)) continue;
    if (c == U'n' && i + 1 < cps.size() && cps[i + 1] == U'g') {
      sk.push_back(Unit::consonant);
      ++i;
      continue;
    }
    sk.push_back(is_vowel_letter(c) ? Unit::vowel : Unit::consonant);
  }
  return sk;
}

SyllableSegmentation syllabify(const CvSkeleton& skeleton) {
  SyllableSegmentation seg;
  std::vector<std::size_t> nuclei;
  for (std::size_t i = 0; i < skeleton.size(); ++i) {
    if (skeleton[i] == Unit::vowel) nuclei.push_back(i);
  }
  if (nuclei.empty()) {
    if (!skeleton.empty()) seg.syllables.push_back(skeleton);
    return seg;
  }
  // Each syllable begins at `start`; the next one begins at the last
  // consonant before the following nucleus (or at that nucleus if none).
  std::size_t start = 0;
  for (std::size_t n = 0; n + 1 < nuclei.size(); ++n) {
    std::size_t next = nuclei[n + 1];
    std::size_t boundary = next - 1 > nuclei[n] ? next - 1 : next;
    seg.syllables.push_back(skeleton.slice(start, boundary - start));
    start = boundary;
  }
  seg.syllables.push_back(skeleton.slice(start, skeleton.size() - start));
  return seg;
}

std::size_t syllable_count(const Token& token) {
  return syllabify(token.skeleton).syllables.size();
}

std::vector<std::size_t> consonant_runs(const CvSkeleton& skeleton) {
  std::vector<std::size_t> runs;
  std::size_t run = 0;
  for (std::size_t i = 0; i < skeleton.size(); ++i) {
    if (skeleton[i] == Unit::consonant) {
      ++run;
    } else if (run) {
      runs.push_back(run);
      run = 0;
    }
  }
  if (run) runs.push_back(run);
  return runs;
}

}  // namespace cebread::textproc
