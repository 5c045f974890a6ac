#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cebread/tree.hpp"

namespace cebread::models {

enum class Kernel { linear, rbf };

struct SvmParams {
  Kernel kernel = Kernel::linear;
  double C = 1.0;
  // RBF width; nullopt means 1 / (n_features * variance of all features).
  std::optional<double> gamma;
  std::size_t max_iterations = 1000;
  double tolerance = 1e-3;
};

// One binary scorer f(x) = sum_i coef_i K(sv_i, x) + bias for the RBF kernel,
// or w . x + bias for the linear kernel.
struct BinarySvm {
  std::vector<double> weights;          // linear only
  std::vector<double> support_vectors;  // rbf only, row-major
  std::vector<double> coefficients;     // rbf only, alpha_i * y_i
  double bias = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

class Svm {
public:
  Svm() = default;
  Svm(Kernel kernel, double gamma, std::size_t n_features, std::vector<BinarySvm> machines);

  Kernel kernel() const { return kernel_; }
  double gamma() const { return gamma_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return machines_.size(); }
  const std::vector<BinarySvm>& machines() const { return machines_; }
  bool converged() const;

  std::vector<double> decision_values(std::span<const double> x) const;
  // One-vs-rest argmax; ties to the lowest class index.
  int predict(std::span<const double> x) const;

private:
  Kernel kernel_ = Kernel::linear;
  double gamma_ = 0.0;
  std::size_t n_features_ = 0;
  std::vector<BinarySvm> machines_;
};

// One binary problem per class (that class vs the rest).
//  linear: full-batch subgradient descent on
//            lambda/2 ||w||^2 + mean_i hinge(y_i (w . x_i + b)),  lambda = 1/(C n)
//          with a Pegasos step size; the bias is an extra constant feature.
//          The iterate with the lowest objective is returned.
//  rbf:    SMO on the dual with maximal-violating-pair selection; stops at
//          tolerance or max_iterations pair updates.
Svm train_svm(const TrainingView& data, const SvmParams& params, std::size_t jobs = 1);

// Primal objective of one linear machine on labels +/-1 (exposed for tests).
double linear_svm_objective(const BinarySvm& m, const TrainingView& data,
                            std::span<const double> y, double C);

}  // namespace cebread::models
