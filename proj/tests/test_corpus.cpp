#include <doctest.h>

#include <set>

#include "cebread/corpus.hpp"
#include "support.hpp"

using namespace cebread;
using cebread::testing::TempDir;
using cebread::testing::write_file;

namespace {

Corpus labelled(const std::vector<Label>& labels) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    docs.push_back({"doc" + std::to_string(i), "Ang bata.", labels[i], std::nullopt});
  }
  return Corpus(std::move(docs));
}

}  // namespace

TEST_CASE("jsonl corpus loads in file order") {
  const auto c = parse_jsonl_corpus(
      R"({"id":"a","text":"Ang bata midagan.","label":1,"source":"bloom"})"
      "\n"
      R"({"id":"b","text":"Ang iro.","label":2})"
      "\n\n"
      R"({"id":"c","text":"Mikaon.","label":"L3","source":null})"
      "\n");
  REQUIRE(c.size() == 3);
  CHECK(c[0].id == "a");
  CHECK(c[0].source == std::optional<std::string>("bloom"));
  CHECK(c[1].label == 2);
  CHECK(c[2].label == 3);
  CHECK_FALSE(c[2].source.has_value());
}

TEST_CASE("jsonl errors name the offending line") {
  auto message = [](const std::string& content) {
    try {
      parse_jsonl_corpus(content);
    } catch (const CorpusError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string ok = R"({"id":"a","text":"x","label":1})";
  CHECK(message(ok + "\n" + R"({"id":"b","text":"y","label":4})") ==
        "line 2: label 4 is outside {1,2,3}");
  CHECK(message(ok + "\n{not json").starts_with("line 2: malformed JSON record"));
  CHECK(message(ok + "\n" + ok).starts_with("line 2: duplicate id 'a'"));
  CHECK(message(R"({"id":"a","text":"   ","label":1})").find("empty text") != std::string::npos);
  CHECK(message(R"({"id":"","text":"x","label":1})") == "line 1: empty document id");
  CHECK(message(R"({"text":"x","label":1})").starts_with("line 1: record needs"));
}

TEST_CASE("missing file is reported") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl", CorpusFormat::jsonl), CorpusError);
}

TEST_CASE("text is NFC-normalized at load") {
  // "e" + combining acute -> precomposed U+00E9
  const auto c = parse_jsonl_corpus("{\"id\":\"a\",\"text\":\"Kap\\u0065\\u0301\",\"label\":1}");
  CHECK(c[0].text == "Kap\xC3\xA9");
}

TEST_CASE("csv corpus with quoted fields") {
  const auto c = parse_csv_corpus(
      "id,text,label,source\n"
      "a,\"Ang bata, midagan.\",1,bloom\n"
      "b,\"Linya usa.\nLinya \"\"duha\"\".\",3,\n");
  REQUIRE(c.size() == 2);
  CHECK(c[0].text == "Ang bata, midagan.");
  CHECK(c[1].text == "Linya usa.\nLinya \"duha\".");
  CHECK_FALSE(c[1].source.has_value());
  CHECK_THROWS_WITH_AS(parse_csv_corpus("id,text,label\nx,hi,9\n"),
                       "line 2: label '9' is outside {1,2,3}", CorpusError);
  CHECK_THROWS_AS(parse_csv_corpus("id,text\nx,hi\n"), CorpusError);
}

TEST_CASE("directory tree takes labels from subdirectories") {
  TempDir dir;
  std::filesystem::create_directories(dir / "1");
  std::filesystem::create_directories(dir / "3");
  write_file(dir / "1" / "b.txt", "Ang iro.");
  write_file(dir / "1" / "a.txt", "Ang bata.");
  write_file(dir / "3" / "c.txt", "Mikaon.");
  const auto c = load_corpus(dir.path(), CorpusFormat::directory);
  REQUIRE(c.size() == 3);
  CHECK(c[0].id == "a");
  CHECK(c[1].id == "b");
  CHECK(c[2].label == 3);

  std::filesystem::create_directories(dir / "L2");
  write_file(dir / "L2" / "z.txt", "Balay.");
  const auto with_l2 = load_corpus(dir.path(), CorpusFormat::directory);
  REQUIRE(with_l2.size() == 4);
  CHECK(with_l2[2].id == "z");
  CHECK(with_l2[2].label == 2);

  std::filesystem::create_directories(dir / "4");
  CHECK_THROWS_AS(load_corpus(dir.path(), CorpusFormat::directory), CorpusError);
}

TEST_CASE("serialize then load yields an equal corpus") {
  const Corpus original = cebread::testing::random_corpus(40, 11);
  TempDir dir;
  save_corpus(original, dir / "c.jsonl");
  CHECK(load_corpus(dir / "c.jsonl", CorpusFormat::jsonl) == original);

  std::vector<Document> docs = original.documents();
  docs[3].source = "Let's \"Read\"";
  docs[5].text = "Tab\tnewline\nunicode ñ…";
  const Corpus tricky(docs);
  CHECK(parse_jsonl_corpus(to_jsonl(tricky)) == tricky);
}

TEST_CASE("format guessing and parsing") {
  CHECK(parse_corpus_format("csv") == CorpusFormat::csv);
  CHECK(parse_corpus_format("directory-tree") == CorpusFormat::directory);
  CHECK_THROWS_AS(parse_corpus_format("xml"), CorpusError);
  CHECK(guess_corpus_format("x.csv") == CorpusFormat::csv);
  CHECK(guess_corpus_format("x.jsonl") == CorpusFormat::jsonl);
}

TEST_CASE("stratified folds for the 76/72/79 distribution") {
  std::vector<Label> labels;
  labels.insert(labels.end(), 76, 1);
  labels.insert(labels.end(), 72, 2);
  labels.insert(labels.end(), 79, 3);
  const Corpus c = labelled(labels);
  const auto fa = stratified_folds(c, 5, 0);
  CHECK(fa.warnings.empty());
  std::array<std::array<int, 3>, 5> counts{};
  for (std::size_t i = 0; i < c.size(); ++i) ++counts[fa.fold_of(c[i].id)][c[i].label - 1];
  for (const auto& fold : counts) {
    CHECK((fold[0] == 15 || fold[0] == 16));
    CHECK((fold[1] == 14 || fold[1] == 15));
    CHECK((fold[2] == 15 || fold[2] == 16));
  }
}

TEST_CASE("single label, ten documents, five folds of two") {
  const auto fa = stratified_folds(labelled(std::vector<Label>(10, 2)), 5, 3);
  std::array<int, 5> sizes{};
  for (auto f : fa.folds()) ++sizes[f];
  for (int s : sizes) CHECK(s == 2);
}

TEST_CASE("fold assignment is deterministic and seed-dependent") {
  const Corpus c = cebread::testing::random_corpus(60, 5);
  CHECK(stratified_folds(c, 5, 42) == stratified_folds(c, 5, 42));
  CHECK_FALSE(stratified_folds(c, 5, 42) == stratified_folds(c, 5, 43));
  CHECK(plain_folds(c, 4, 9) == plain_folds(c, 4, 9));
}

TEST_CASE("fold argument errors and warnings") {
  CHECK_THROWS_AS(stratified_folds(labelled({1, 2, 3}), 1, 0), EvalError);
  CHECK_THROWS_AS(stratified_folds(Corpus{}, 5, 0), EvalError);
  const auto fa = stratified_folds(labelled({1, 1, 2, 2, 2, 2, 2}), 5, 0);
  CHECK(fa.warnings.size() == 1);
}

TEST_CASE("stratification property over random corpora") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Label> labels;
    const auto n = 5 + rng.below(120);
    for (std::uint64_t i = 0; i < n; ++i) labels.push_back(static_cast<Label>(1 + rng.below(3)));
    const Corpus c = labelled(labels);
    const std::size_t k = 2 + rng.below(6);
    const auto fa = stratified_folds(c, k, rng.next());
    // Union is the corpus, folds disjoint by construction of a map.
    CHECK(fa.ids().size() == c.size());
    std::set<std::string> ids(fa.ids().begin(), fa.ids().end());
    CHECK(ids.size() == c.size());
    std::vector<std::array<long, 3>> counts(k);
    std::vector<long> sizes(k, 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      ++counts[fa.fold_of(c[i].id)][c[i].label - 1];
      ++sizes[fa.fold_of(c[i].id)];
    }
    for (int l = 0; l < 3; ++l) {
      long lo = counts[0][l], hi = counts[0][l];
      for (const auto& f : counts) {
        lo = std::min(lo, f[l]);
        hi = std::max(hi, f[l]);
      }
      CHECK(hi - lo <= 1);
    }
    CHECK(*std::max_element(sizes.begin(), sizes.end()) -
              *std::min_element(sizes.begin(), sizes.end()) <=
          1);
  }
}
