#include "cebread/metrics.hpp"

namespace cebread {

Metrics compute_metrics(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw EvalError("metrics: label vectors differ in length (" + std::to_string(y_true.size()) +
                    " vs " + std::to_string(y_pred.size()) + ")");
  }
  if (y_true.empty()) throw EvalError("metrics: no predictions to score");
  Metrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (!is_valid_label(y_true[i]) || !is_valid_label(y_pred[i])) {
      throw EvalError("metrics: label outside {1,2,3}");
    }
    ++m.confusion[static_cast<std::size_t>(y_true[i] - 1)][static_cast<std::size_t>(y_pred[i] - 1)];
  }
  std::size_t correct = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t tp = m.confusion[c][c], predicted = 0, actual = 0;
    for (std::size_t o = 0; o < 3; ++o) {
      predicted += m.confusion[o][c];
      actual += m.confusion[c][o];
    }
    correct += tp;
    auto& s = m.per_class[c];
    s.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    s.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                        : 0.0;
    m.macro_precision += s.precision / 3.0;
    m.macro_recall += s.recall / 3.0;
    m.macro_f1 += s.f1 / 3.0;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
  return m;
}

}  // namespace cebread
