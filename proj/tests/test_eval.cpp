#include <doctest.h>

#include <cmath>

#include "cebread/interpret.hpp"
#include "cebread/metrics.hpp"
#include "cebread/validation.hpp"
#include "support.hpp"

using namespace cebread;
using cebread::testing::make_matrix;

namespace {

// Three classes separated by thresholds on f0, plus a uniform noise column.
FeatureMatrix threshold_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const Label l = static_cast<Label>(1 + i % 3);
    rows.push_back({(l - 1) * 10.0 + rng.uniform() * 5, rng.uniform()});
    labels.push_back(l);
  }
  return make_matrix(rows, labels);
}

FoldAssignment folds_for(const FeatureMatrix& m, std::size_t k, std::uint64_t seed) {
  std::vector<Document> docs;
  for (std::size_t r = 0; r < m.rows(); ++r) docs.push_back({m.doc_ids()[r], "x", m.labels()[r], {}});
  return stratified_folds(Corpus(docs), k, seed);
}

}  // namespace

TEST_CASE("metrics examples") {
  const std::vector<Label> t{1, 1, 2, 2, 3, 3};
  const auto perfect = compute_metrics(t, t);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);
  CHECK(perfect.macro_precision == 1.0);

  const auto m = compute_metrics(t, std::vector<Label>{1, 2, 2, 3, 3, 1});
  CHECK(m.accuracy == 0.5);
  for (const auto& c : m.per_class) {
    CHECK(c.precision == 0.5);
    CHECK(c.recall == 0.5);
    CHECK(c.f1 == 0.5);
  }
  CHECK(m.macro_f1 == 0.5);
  CHECK(m.confusion[0][1] == 1);

  const auto never3 = compute_metrics(t, std::vector<Label>{1, 1, 2, 2, 2, 1});
  CHECK(never3.per_class[2].precision == 0.0);
  CHECK(never3.per_class[2].recall == 0.0);
  CHECK(never3.per_class[2].f1 == 0.0);

  CHECK_THROWS_AS(compute_metrics(t, std::vector<Label>{1}), EvalError);
  CHECK_THROWS_AS(compute_metrics(std::vector<Label>{}, std::vector<Label>{}), EvalError);
}

TEST_CASE("cross-validation on data split by one threshold is perfect for every model") {
  Rng rng(1);
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  for (int i = 0; i < 60; ++i) {
    const Label l = i % 2 ? 3 : 1;
    rows.push_back({(l == 3 ? 6.0 : 0.0) + rng.uniform() * 5, rng.uniform()});
    labels.push_back(l);
  }
  const auto m = make_matrix(rows, labels);
  const auto folds = folds_for(m, 5, 0);
  for (auto kind : kAllModelKinds) {
    const auto r = cross_validate(m, folds, default_hyperparameters(kind));
    CHECK(r.folds.size() == 5);
    CHECK(r.accuracy.mean == 1.0);
    CHECK(r.accuracy.stddev == 0.0);
  }
}

TEST_CASE("three classes between two thresholds") {
  const auto m = threshold_data(60, 1);
  const auto folds = folds_for(m, 5, 0);
  // A linear one-vs-rest machine can only isolate the middle class with weak
  // regularization; softmax, RBF and trees manage with defaults.
  for (auto [kind, spec] : {std::pair{ModelKind::logreg, ""}, {ModelKind::rforest, ""},
                            {ModelKind::svm, "kernel=rbf"}, {ModelKind::svm, "C=100,max_iter=5000"}}) {
    const auto r = cross_validate(m, folds, parse_hyperparameters(kind, spec));
    CHECK(r.accuracy.mean == 1.0);
    CHECK(r.macro_f1.mean == 1.0);
  }
}

TEST_CASE("constant features give the majority rate") {
  std::vector<std::vector<double>> rows(50, {1.0, 2.0});
  std::vector<Label> labels;
  for (int i = 0; i < 50; ++i) labels.push_back(i < 30 ? 2 : (i < 40 ? 1 : 3));
  const auto m = make_matrix(rows, labels);
  const auto folds = folds_for(m, 5, 3);
  for (auto kind : kAllModelKinds) {
    CHECK(cross_validate(m, folds, default_hyperparameters(kind)).accuracy.mean ==
          doctest::Approx(0.6));
  }
}

TEST_CASE("cross-validation is deterministic and independent of jobs") {
  const auto m = threshold_data(45, 4);
  const auto folds = folds_for(m, 3, 1);
  const auto hp = parse_hyperparameters(ModelKind::rforest, "n_estimators=15,seed=3");
  const auto a = cross_validate(m, folds, hp, "X", 1);
  const auto b = cross_validate(m, folds, hp, "X", 3);
  CHECK(a.accuracy.mean == b.accuracy.mean);
  CHECK(a.macro_f1.stddev == b.macro_f1.stddev);
  for (std::size_t f = 0; f < a.folds.size(); ++f) CHECK(a.folds[f].confusion == b.folds[f].confusion);
}

TEST_CASE("standardization is fit on training rows only") {
  const auto m = threshold_data(30, 2);
  const auto folds = folds_for(m, 3, 9);
  const auto rows = fold_rows(m, folds);
  for (std::size_t f = 0; f < rows.size(); ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t g = 0; g < rows.size(); ++g) {
      if (g != f) train_rows.insert(train_rows.end(), rows[g].begin(), rows[g].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    const auto train_matrix = m.select_rows(train_rows);
    const auto model = train(train_matrix, default_hyperparameters(ModelKind::logreg));
    CHECK(model.standardization() == fit_standardization(train_matrix));
    CHECK_FALSE(model.standardization() == fit_standardization(m));
  }
}

TEST_CASE("fold mismatch is an error") {
  const auto m = threshold_data(9, 2);
  const auto other = folds_for(threshold_data(6, 2), 2, 0);
  CHECK_THROWS_AS(fold_rows(m, other), EvalError);
}

TEST_CASE("grid expansion") {
  const auto lr = default_grid(ModelKind::logreg).expand();
  CHECK(lr.size() == 8);
  CHECK(default_grid(ModelKind::svm).expand().size() == 12);
  const auto rf = default_grid(ModelKind::rforest).expand();
  CHECK(rf.size() == 36);
  CHECK(rf.front().describe() == "n_estimators=50,max_features=sqrt,max_depth=5,seed=0");
  const auto g = override_grid(default_grid(ModelKind::rforest), "n_estimators=10;max_depth=1|none");
  CHECK(g.expand().size() == 6);
  CHECK_THROWS_AS(override_grid(default_grid(ModelKind::rforest), "max_depth="), EvalError);
  GridSpec empty{ModelKind::svm, {{"C", {}}}, ""};
  CHECK_THROWS_AS(empty.expand(), EvalError);
}

TEST_CASE("grid search picks the best point") {
  // Two thresholds are needed, so depth 1 cannot be perfect.
  const auto m = threshold_data(60, 5);
  const auto folds = folds_for(m, 5, 2);
  GridSpec grid{ModelKind::rforest, {{"max_depth", {"1", "20"}}}, "n_estimators=20"};
  const auto r = grid_search(m, folds, grid);
  REQUIRE(r.results.size() == 2);
  CHECK(r.best == 1);
  CHECK(r.results[0].accuracy.mean < 1.0);
  for (const auto& res : r.results) CHECK(r.best_result().macro_f1.mean >= res.macro_f1.mean);

  GridSpec single{ModelKind::logreg, {{"C", {"0.5"}}}, ""};
  const auto s = grid_search(m, folds, single);
  CHECK(s.results.size() == 1);
  CHECK(s.best == 0);

  // Identical points tie: the first wins.
  GridSpec same{ModelKind::logreg, {{"C", {"1", "1"}}}, ""};
  CHECK(grid_search(m, folds, same).best == 0);
}

TEST_CASE("ablation skips neural rows without embeddings") {
  const auto corpus = cebread::testing::random_corpus(30, 3);
  const auto folds = stratified_folds(corpus, 3, 0);
  AblationRequest req;
  req.kinds = {ModelKind::logreg};
  req.grids[ModelKind::logreg] = GridSpec{ModelKind::logreg, {{"C", {"1"}}}, ""};
  const auto table = run_ablations(corpus, nullptr, folds, req);
  REQUIRE(table.cells.size() == 5);
  CHECK(table.cells[0].result.has_value());
  CHECK(table.cells[2].result->results[0].feature_set == "TRAD+SYLL");
  CHECK_FALSE(table.cells[3].result.has_value());
  CHECK_FALSE(table.cells[3].skipped.empty());
  CHECK_FALSE(table.cells[4].result.has_value());
}

TEST_CASE("average ranks and spearman") {
  CHECK(average_ranks(std::vector<double>{10, 30, 20, 20}) == std::vector<double>{1, 4, 2.5, 2.5});
  const std::vector<double> y{1, 2, 3};
  CHECK(spearman(std::vector<double>{1, 2, 3}, y) == 1.0);
  CHECK(spearman(std::vector<double>{3, 2, 1}, y) == -1.0);
  CHECK(spearman(std::vector<double>{1, 1, 2}, y) == doctest::Approx(0.8660254037844386).epsilon(1e-14));
  bool degenerate = false;
  CHECK(spearman(std::vector<double>{4, 4, 4}, y, &degenerate) == 0.0);
  CHECK(degenerate);
}

TEST_CASE("spearman ranking") {
  const auto m = make_matrix({{1, 3, 7}, {2, 2, 7}, {3, 1, 7}, {4, 1, 7}}, {1, 2, 3, 3},
                             {"up", "down", "flat"});
  const auto r = spearman_ranking(m);
  REQUIRE(r.size() == 3);
  CHECK(r[0].feature == "down");
  CHECK(r[0].rho == -1.0);
  CHECK(r[1].feature == "up");
  CHECK(r[1].rho == doctest::Approx(0.9486832980505138));
  CHECK(r[2].degenerate);
  CHECK_THROWS_AS(spearman_ranking(make_matrix({{1}}, {1})), EvalError);
  CHECK_THROWS_AS(spearman_ranking(make_matrix({{1}, {2}}, {2, 2})), EvalError);
  CHECK(feature_group("unique_words") == "TRAD");
  CHECK(feature_group("cvc_density") == "SYLL");
  CHECK(feature_group("neural_010") == "NEURAL");
}

TEST_CASE("permutation importance") {
  // f0 equals the label; f1 is noise the forest never needs.
  Rng rng(8);
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  for (int i = 0; i < 300; ++i) {
    const Label l = static_cast<Label>(1 + i % 3);
    rows.push_back({static_cast<double>(l), rng.uniform()});
    labels.push_back(l);
  }
  const auto m = make_matrix(rows, labels);
  const auto model = train(m, parse_hyperparameters(ModelKind::rforest, "n_estimators=20,max_features=all"));
  const auto r = permutation_importance(model, m, 20, 4);
  CHECK(r.baseline_accuracy == 1.0);
  // Shuffling a balanced label column leaves about a third right by chance.
  CHECK(r.features[0].mean_drop == doctest::Approx(1.0 - 1.0 / 3).epsilon(0.1));
  CHECK(std::abs(r.features[1].mean_drop) <= 0.05);

  const auto again = permutation_importance(model, m, 20, 4);
  CHECK(again.features[0].mean_drop == r.features[0].mean_drop);
  CHECK(again.features[1].stddev == r.features[1].stddev);
  CHECK_THROWS_AS(permutation_importance(model, m, 0, 4), EvalError);
  const auto wrong = make_matrix({{1.0}}, {1});
  CHECK_THROWS(permutation_importance(model, wrong, 2, 0));
}
