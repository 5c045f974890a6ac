#pragma once

#include <span>
#include <vector>

#include "cebread/tree.hpp"

namespace cebread::models {

enum class Penalty { l1, l2 };

// gradient_descent: plain gradient steps on the smooth L2 objective.
// proximal: gradient step on the data term followed by the penalty's
// proximal map (soft-threshold for L1, shrinkage for L2).
enum class Solver { gradient_descent, proximal };

struct LogRegParams {
  Penalty penalty = Penalty::l2;
  double C = 1.0;  // inverse regularization strength
  Solver solver = Solver::gradient_descent;
  std::size_t max_iterations = 2000;
  double tolerance = 1e-8;
};

// Softmax regression over K classes. The objective is
//   mean_i CE(x_i, y_i) + R(W) / (C n)
// with R = ||W||_1 or ||W||^2 / 2; biases are not penalized.
class LogisticRegression {
public:
  LogisticRegression() = default;
  LogisticRegression(std::size_t n_classes, std::size_t n_features, std::vector<double> weights,
                     std::vector<double> bias);

  std::size_t n_classes() const { return n_classes_; }
  std::size_t n_features() const { return n_features_; }
  // Row-major K x d.
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }

  std::vector<double> scores(std::span<const double> x) const;
  std::vector<double> probabilities(std::span<const double> x) const;
  int predict(std::span<const double> x) const;

private:
  std::size_t n_classes_ = 0;
  std::size_t n_features_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct LogRegFit {
  LogisticRegression model;
  std::vector<double> objective_history;  // includes the starting point
  std::size_t iterations = 0;
  bool converged = false;
};

// Starts from all-zero parameters. Each step uses a persistent step size that
// is halved (and the step retried) whenever the objective would increase, so
// the recorded objective never goes up.
LogRegFit train_logreg(const TrainingView& data, const LogRegParams& params);

double logreg_objective(const LogisticRegression& model, const TrainingView& data,
                        const LogRegParams& params);

}  // namespace cebread::models
