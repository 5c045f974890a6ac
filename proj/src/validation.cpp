#include "cebread/validation.hpp"

#include <cmath>
#include <sstream>

#include "cebread/parallel.hpp"
#include "cebread/unicode.hpp"

namespace cebread {

namespace {

MetricSummary summary_of(const std::vector<Metrics>& folds, double Metrics::*field) {
  MetricSummary s;
  if (folds.empty()) return s;
  for (const auto& m : folds) s.mean += m.*field;
  s.mean /= static_cast<double>(folds.size());
  double sq = 0.0;
  for (const auto& m : folds) sq += (m.*field - s.mean) * (m.*field - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(folds.size()));
  return s;
}

Metrics evaluate_fold(const FeatureMatrix& matrix, const std::vector<std::vector<std::size_t>>& rows,
                      std::size_t fold, const Hyperparameters& hp) {
  std::vector<std::size_t> train_rows;
  for (std::size_t f = 0; f < rows.size(); ++f) {
    if (f != fold) train_rows.insert(train_rows.end(), rows[f].begin(), rows[f].end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  const FeatureMatrix train_set = matrix.select_rows(train_rows);
  const FeatureMatrix test_set = matrix.select_rows(rows[fold]);
  const TrainedModel model = train(train_set, hp);
  const auto predicted = predict(model, test_set);
  return compute_metrics(test_set.labels(), predicted);
}

}  // namespace

CvResult summarize(std::string feature_set, Hyperparameters hp, std::vector<Metrics> folds) {
  CvResult r{std::move(feature_set), std::move(hp), std::move(folds), {}, {}, {}, {}};
  r.accuracy = summary_of(r.folds, &Metrics::accuracy);
  r.macro_precision = summary_of(r.folds, &Metrics::macro_precision);
  r.macro_recall = summary_of(r.folds, &Metrics::macro_recall);
  r.macro_f1 = summary_of(r.folds, &Metrics::macro_f1);
  return r;
}

std::vector<std::vector<std::size_t>> fold_rows(const FeatureMatrix& matrix,
                                                const FoldAssignment& folds) {
  std::vector<std::vector<std::size_t>> rows(folds.k());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    rows[folds.fold_of(matrix.doc_ids()[r])].push_back(r);
  }
  for (std::size_t f = 0; f < rows.size(); ++f) {
    if (rows[f].empty()) throw EvalError("fold " + std::to_string(f) + " has no documents");
  }
  return rows;
}

CvResult cross_validate(const FeatureMatrix& matrix, const FoldAssignment& folds,
                        const Hyperparameters& hp, std::string feature_set, std::size_t jobs) {
  const auto rows = fold_rows(matrix, folds);
  std::vector<Metrics> metrics(folds.k());
  parallel_for(folds.k(), jobs, [&](std::size_t f) { metrics[f] = evaluate_fold(matrix, rows, f, hp); });
  return summarize(std::move(feature_set), hp, std::move(metrics));
}

std::vector<Hyperparameters> GridSpec::expand() const {
  std::vector<std::string> points{""};
  for (const auto& [key, values] : axes) {
    if (values.empty()) throw EvalError("grid axis '" + key + "' has no candidates");
    std::vector<std::string> next;
    for (const auto& p : points) {
      for (const auto& v : values) next.push_back(p + (p.empty() ? "" : ",") + key + "=" + v);
    }
    points = std::move(next);
  }
  std::vector<Hyperparameters> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    std::string text = fixed.empty() ? p : (p.empty() ? fixed : fixed + "," + p);
    out.push_back(parse_hyperparameters(kind, text));
  }
  return out;
}

GridSpec default_grid(ModelKind kind) {
  switch (kind) {
    case ModelKind::logreg:
      return {kind, {{"penalty", {"l1", "l2"}}, {"C", {"0.01", "0.1", "1", "10"}}}, {}};
    case ModelKind::svm:
      return {kind,
              {{"kernel", {"linear", "rbf"}}, {"C", {"0.1", "1", "10"}}, {"max_iter", {"1000", "5000"}}},
              {}};
    case ModelKind::rforest:
      return {kind,
              {{"n_estimators", {"50", "100", "200"}},
               {"max_features", {"sqrt", "log2", "all"}},
               {"max_depth", {"5", "10", "20", "none"}}},
              {}};
  }
  throw EvalError("unknown model kind");
}

GridSpec override_grid(GridSpec base, std::string_view text) {
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = unicode::trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw EvalError("grid override '" + item + "' needs key=v1|v2");
    const std::string key = unicode::trim(item.substr(0, eq));
    std::vector<std::string> values;
    std::stringstream vs(item.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, '|')) {
      v = unicode::trim(v);
      if (!v.empty()) values.push_back(v);
    }
    if (values.empty()) throw EvalError("grid override for '" + key + "' has no values");
    bool replaced = false;
    for (auto& [k, vals] : base.axes) {
      if (k == key) {
        vals = values;
        replaced = true;
      }
    }
    if (!replaced) base.axes.emplace_back(key, std::move(values));
  }
  base.expand();  // validate eagerly
  return base;
}

GridResult grid_search(const FeatureMatrix& matrix, const FoldAssignment& folds,
                       const GridSpec& grid, std::string feature_set, std::size_t jobs) {
  const auto points = grid.expand();
  if (points.empty()) throw EvalError("grid search needs at least one grid point");
  const auto rows = fold_rows(matrix, folds);
  const std::size_t k = folds.k();
  std::vector<Metrics> metrics(points.size() * k);
  parallel_for(metrics.size(), jobs, [&](std::size_t t) {
    metrics[t] = evaluate_fold(matrix, rows, t % k, points[t / k]);
  });

  GridResult out;
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<Metrics> m(metrics.begin() + static_cast<std::ptrdiff_t>(p * k),
                           metrics.begin() + static_cast<std::ptrdiff_t>((p + 1) * k));
    out.results.push_back(summarize(feature_set, points[p], std::move(m)));
  }
  for (std::size_t p = 1; p < out.results.size(); ++p) {
    const auto& cand = out.results[p];
    const auto& best = out.results[out.best];
    if (cand.macro_f1.mean > best.macro_f1.mean ||
        (cand.macro_f1.mean == best.macro_f1.mean && cand.accuracy.mean > best.accuracy.mean)) {
      out.best = p;
    }
  }
  return out;
}

AblationTable run_ablations(const Corpus& corpus, const EmbeddingStore* embeddings,
                            const FoldAssignment& folds, const AblationRequest& request) {
  AblationTable table;
  for (const auto& sets : request.feature_sets) {
    std::optional<FeatureMatrix> matrix;
    std::string skipped;
    if (sets.neural && embeddings == nullptr) {
      skipped = "no embeddings supplied";
    } else {
      matrix = assemble(corpus, sets, embeddings);
    }
    for (ModelKind kind : request.kinds) {
      AblationCell cell{sets, kind, std::nullopt, skipped};
      if (matrix) {
        auto it = request.grids.find(kind);
        const GridSpec grid = it != request.grids.end() ? it->second : default_grid(kind);
        cell.result = grid_search(*matrix, folds, grid, sets.name(), request.jobs);
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace cebread
