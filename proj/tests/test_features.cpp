#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cebread/features.hpp"
#include "support.hpp"

using namespace cebread;
using cebread::testing::TempDir;
using cebread::testing::write_file;

namespace {

Document doc(std::string text, std::string id = "d") {
  return {std::move(id), std::move(text), 1, std::nullopt};
}

std::string embedding_line(const std::string& id, std::size_t dim, double value) {
  std::ostringstream os;
  os << "{\"id\":\"" << id << "\",\"vector\":[";
  for (std::size_t i = 0; i < dim; ++i) os << (i ? "," : "") << value + static_cast<double>(i);
  os << "]}\n";
  return os.str();
}

}  // namespace

TEST_CASE("trad features of the two-sentence example") {
  const auto f = trad_features(doc("Ang bata midagan. Ang iro mikaon."));
  CHECK(f.names == trad_feature_names());
  CHECK(f.at("unique_words") == 5);
  CHECK(f.at("word_count") == 6);
  CHECK(f.at("average_word_len") == doctest::Approx(26.0 / 6).epsilon(1e-15));
  CHECK(f.at("average_syllable_count") == 2.0);
  CHECK(f.at("sentence_count") == 2);
  CHECK(f.at("average_sentence_len") == 3.0);
  CHECK(f.at("polysyll_count") == 2);
  CHECK_THROWS_AS(f.at("nope"), FeatureError);
}

TEST_CASE("trad features of a single word") {
  const auto f = trad_features(doc("ako"));
  CHECK(f.values == std::vector<double>{1, 1, 3, 2, 1, 1, 0});
}

TEST_CASE("duplicating the text keeps unique_words and doubles word_count") {
  const Corpus c = cebread::testing::random_corpus(20, 9);
  for (const auto& d : c.documents()) {
    const auto once = trad_features(d);
    const auto twice = trad_features(doc(d.text + " " + d.text));
    CHECK(twice.at("unique_words") == once.at("unique_words"));
    CHECK(twice.at("word_count") == 2 * once.at("word_count"));
    CHECK(twice.at("average_word_len") == doctest::Approx(once.at("average_word_len")));
  }
}

TEST_CASE("syll features") {
  const auto a = syll_features(doc("ako balay"));
  CHECK(a.names == syll_feature_names());
  CHECK(a.values == std::vector<double>{0.5, 1.0, 0, 0, 0.5, 0, 0, 0});
  const auto b = syll_features(doc("plato"));
  CHECK(b.values == std::vector<double>{0, 1.0, 0, 0, 0, 1.0, 0, 1.0});
  CHECK(syll_features(doc("ang bata midagan")).at("consonant_cluster") == 0);
}

TEST_CASE("feature invariants on random documents") {
  const Corpus c = cebread::testing::random_corpus(200, 31);
  for (const auto& d : c.documents()) {
    const auto t = trad_features(d);
    CHECK(t.at("unique_words") <= t.at("word_count"));
    CHECK(t.at("average_syllable_count") >= 1);
    CHECK(t.at("average_sentence_len") >= 1);
    CHECK(t.at("polysyll_count") <= t.at("word_count"));
    for (double v : syll_features(d).values) CHECK(v >= 0);
  }
}

TEST_CASE("documents without words are rejected") {
  CHECK_THROWS_WITH_AS(trad_features(doc("123 !!", "x")),
                       "empty document: 'x' contains no words", FeatureError);
  CHECK_THROWS_AS(syll_features(doc("...")), FeatureError);
}

TEST_CASE("feature set names and parsing") {
  CHECK(parse_feature_sets("trad+syll").name() == "TRAD+SYLL");
  CHECK(parse_feature_sets("syll,trad") == parse_feature_sets("TRAD+SYLL"));
  CHECK(parse_feature_sets("combination").name() == "Combination");
  CHECK(parse_feature_sets("neural").name() == "NEURAL");
  CHECK_THROWS_AS(parse_feature_sets("lexical"), FeatureError);
  const auto rows = ablation_feature_sets();
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].name() == "TRAD");
  CHECK(rows[4].name() == "Combination");
}

TEST_CASE("embedding loading") {
  TempDir dir;
  write_file(dir / "two.jsonl", embedding_line("a", 768, 0.5) + embedding_line("b", 768, -1));
  const auto store = load_embeddings(dir / "two.jsonl");
  CHECK(store.size() == 2);
  CHECK(store.dim() == std::optional<std::size_t>(768));
  CHECK(store.at("b")[2] == 1.0);

  CHECK_THROWS_AS(parse_embeddings(embedding_line("a", 768, 0) + embedding_line("b", 767, 0)),
                  FeatureError);
  CHECK_THROWS_AS(parse_embeddings(embedding_line("a", 3, 0) + embedding_line("a", 3, 0)),
                  FeatureError);
  CHECK(parse_embeddings("{\"dim\":3,\"model\":\"x\"}\n" + embedding_line("a", 3, 0)).size() == 1);
  CHECK_THROWS_AS(parse_embeddings("{\"dim\":4}\n" + embedding_line("a", 3, 0)), FeatureError);

  write_file(dir / "empty.jsonl", "");
  const auto empty = load_embeddings(dir / "empty.jsonl");
  CHECK(empty.size() == 0);
  CHECK_FALSE(empty.dim().has_value());
  const Corpus c({doc("ako")});
  CHECK_THROWS_WITH_AS(assemble(c, parse_feature_sets("neural"), &empty),
                       doctest::Contains("missing embedding"), FeatureError);
}

TEST_CASE("assembled widths and column order") {
  const Corpus c = cebread::testing::random_corpus(6, 2);
  EmbeddingStore store;
  for (const auto& d : c.documents()) store.insert(d.id, std::vector<double>(768, 0.25));
  CHECK(assemble(c, parse_feature_sets("trad")).cols() == 7);
  const auto ts = assemble(c, parse_feature_sets("trad,syll"));
  CHECK(ts.cols() == 15);
  CHECK(ts.schema()[7] == "v_density");
  const auto all = assemble(c, parse_feature_sets("all"), &store);
  CHECK(all.cols() == 783);
  CHECK(all.schema()[15] == "neural_000");
  CHECK(all.schema()[782] == "neural_767");
  CHECK(all.rows() == c.size());
  CHECK(all.labels()[1] == c[1].label);
  CHECK(all(3, 0) == trad_features(c[3]).values[0]);
  CHECK_THROWS_AS(assemble(c, parse_feature_sets("neural")), FeatureError);
}

TEST_CASE("standardization") {
  const auto m = cebread::testing::make_matrix({{1, 5}, {2, 5}, {3, 5}}, {1, 2, 3});
  const auto s = standardize(m);
  CHECK(s.stats.mean == std::vector<double>{2, 5});
  CHECK(s.matrix(0, 0) == doctest::Approx(-1.2247448713915890).epsilon(1e-15));
  CHECK(s.matrix(1, 0) == 0.0);
  CHECK(s.matrix(2, 0) == doctest::Approx(1.2247448713915890).epsilon(1e-15));
  for (std::size_t r = 0; r < 3; ++r) CHECK(s.matrix(r, 1) == 0.0);

  // Test rows use the training statistics, not their own.
  const auto test = cebread::testing::make_matrix({{4, 7}}, {1});
  const auto t = standardize(test, s.stats);
  CHECK(t.stats == s.stats);
  CHECK(t.matrix(0, 0) == doctest::Approx(2 / std::sqrt(2.0 / 3)));
  CHECK(t.matrix(0, 1) == 0.0);

  const auto wrong = cebread::testing::make_matrix({{4}}, {1});
  CHECK_THROWS_AS(standardize(wrong, s.stats), FeatureError);
}

TEST_CASE("feature csv") {
  const auto m = cebread::testing::make_matrix({{1, 0.5}}, {2});
  std::ostringstream os;
  write_feature_csv(os, m);
  CHECK(os.str().starts_with("id,label,"));
  CHECK(os.str().find("\n") != std::string::npos);
}
