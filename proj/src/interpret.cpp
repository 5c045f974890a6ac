#include "cebread/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cebread/rng.hpp"

namespace cebread {

namespace {

double accuracy(const std::vector<Label>& truth, const std::vector<Label>& predicted) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace

PermutationResult permutation_importance(const TrainedModel& model, const FeatureMatrix& matrix,
                                         std::size_t repeats, std::uint64_t seed) {
  if (repeats < 1) throw EvalError("permutation importance needs repeats >= 1");
  if (matrix.rows() == 0) throw EvalError("permutation importance needs at least one row");
  if (matrix.schema() != model.schema()) {
    throw EvalError("schema mismatch: matrix columns differ from the model's feature schema");
  }
  PermutationResult result;
  result.baseline_accuracy = accuracy(matrix.labels(), predict(model, matrix));

  FeatureMatrix work = matrix;
  std::vector<std::size_t> order(matrix.rows());
  for (std::size_t f = 0; f < matrix.cols(); ++f) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(f)));
    const std::vector<double> original = matrix.column(f);
    std::vector<double> drops;
    drops.reserve(repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.shuffle(order);
      for (std::size_t i = 0; i < matrix.rows(); ++i) work(i, f) = original[order[i]];
      drops.push_back(result.baseline_accuracy - accuracy(matrix.labels(), predict(model, work)));
    }
    for (std::size_t i = 0; i < matrix.rows(); ++i) work(i, f) = original[i];
    const double mean = std::accumulate(drops.begin(), drops.end(), 0.0) /
                        static_cast<double>(drops.size());
    double sq = 0.0;
    for (double d : drops) sq += (d - mean) * (d - mean);
    result.features.push_back(
        {matrix.schema()[f], mean, std::sqrt(sq / static_cast<double>(drops.size()))});
  }
  return result;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    // Positions i..j (0-based) share rank mean(i+1..j+1).
    const double rank = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y, bool* degenerate) {
  if (x.size() != y.size()) throw EvalError("correlation: vectors differ in length");
  if (x.size() < 2) throw EvalError("correlation: >=2 rows required");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const bool flat = sxx == 0.0 || syy == 0.0;
  if (degenerate) *degenerate = flat;
  if (flat) return 0.0;
  // Exact for identical or mirrored orderings, where rounding in the square
  // root could otherwise leave us an ulp short of +/-1.
  if (sxx == syy && std::abs(sxy) == sxx) return sxy > 0 ? 1.0 : -1.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y, bool* degenerate) {
  if (x.size() != y.size()) throw EvalError("correlation: vectors differ in length");
  if (x.size() < 2) throw EvalError("correlation: >=2 rows required");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry, degenerate);
}

std::vector<Correlation> spearman_ranking(const FeatureMatrix& matrix) {
  if (matrix.rows() < 2) throw EvalError("Spearman ranking: >=2 rows required");
  std::vector<double> labels(matrix.labels().begin(), matrix.labels().end());
  if (std::all_of(labels.begin(), labels.end(), [&](double l) { return l == labels.front(); })) {
    throw EvalError("Spearman ranking: label column is constant");
  }
  std::vector<Correlation> out;
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    Correlation corr{matrix.schema()[c], 0.0, false};
    const auto col = matrix.column(c);
    corr.rho = spearman(col, labels, &corr.degenerate);
    out.push_back(std::move(corr));
  }
  std::stable_sort(out.begin(), out.end(), [](const Correlation& a, const Correlation& b) {
    return std::abs(a.rho) > std::abs(b.rho);
  });
  return out;
}

std::string feature_group(std::string_view feature) {
  const auto& trad = trad_feature_names();
  if (std::find(trad.begin(), trad.end(), feature) != trad.end()) return "TRAD";
  const auto& syll = syll_feature_names();
  if (std::find(syll.begin(), syll.end(), feature) != syll.end()) return "SYLL";
  return "NEURAL";
}

}  // namespace cebread
