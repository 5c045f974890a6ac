#pragma once

#include <array>
#include <span>
#include <vector>

#include "cebread/corpus.hpp"

namespace cebread {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::array<ClassScores, 3> per_class{};
  // confusion[true][predicted], indexed by label - 1.
  std::array<std::array<std::size_t, 3>, 3> confusion{};
};

// Macro scores average over the three fixed grade levels; a zero
// denominator yields 0 for that score.
Metrics compute_metrics(std::span<const Label> y_true, std::span<const Label> y_pred);

}  // namespace cebread
