#include "cebread/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cebread/parallel.hpp"

namespace cebread::models {

Svm::Svm(Kernel kernel, double gamma, std::size_t n_features, std::vector<BinarySvm> machines)
    : kernel_(kernel), gamma_(gamma), n_features_(n_features), machines_(std::move(machines)) {}

bool Svm::converged() const {
  return std::all_of(machines_.begin(), machines_.end(),
                     [](const BinarySvm& m) { return m.converged; });
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

double hinge_mean(const BinarySvm& m, const TrainingView& data, std::span<const double> y) {
  double h = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double margin = y[i] * (dot(m.weights, data.row(i)) + m.bias);
    h += std::max(0.0, 1.0 - margin);
  }
  return h / static_cast<double>(data.rows());
}

double primal(const BinarySvm& m, const TrainingView& data, std::span<const double> y,
              double lambda) {
  double reg = dot(m.weights, m.weights) + m.bias * m.bias;
  return 0.5 * lambda * reg + hinge_mean(m, data, y);
}

constexpr double kMinImprovement = 1e-7;
constexpr std::size_t kStallLimit = 100;

BinarySvm fit_linear(const TrainingView& data, std::span<const double> y, const SvmParams& p) {
  const std::size_t n = data.rows(), d = data.cols;
  const double lambda = 1.0 / (p.C * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);

  BinarySvm cur;
  cur.weights.assign(d, 0.0);
  BinarySvm best = cur;
  double best_obj = primal(cur, data, y, lambda);
  std::vector<double> g(d);
  double gb = 0.0;

  std::size_t it = 0;
  std::size_t stall = 0;
  for (; it < p.max_iterations; ++it) {
    // Subgradient of the mean hinge.
    std::fill(g.begin(), g.end(), 0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = data.row(i);
      if (y[i] * (dot(cur.weights, x) + cur.bias) < 1.0) {
        for (std::size_t j = 0; j < d; ++j) g[j] -= y[i] * x[j];
        gb -= y[i];
      }
    }
    const double eta = 1.0 / (lambda * static_cast<double>(it + 1));
    const double shrink = 1.0 - eta * lambda;  // 0 on the first step
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      cur.weights[j] = shrink * cur.weights[j] - eta * g[j] / static_cast<double>(n);
      norm_sq += cur.weights[j] * cur.weights[j];
    }
    cur.bias = shrink * cur.bias - eta * gb / static_cast<double>(n);
    norm_sq += cur.bias * cur.bias;
    if (norm_sq > radius * radius) {
      const double s = radius / std::sqrt(norm_sq);
      for (double& w : cur.weights) w *= s;
      cur.bias *= s;
    }
    const double obj = primal(cur, data, y, lambda);
    if (obj < best_obj) {
      stall = best_obj - obj > kMinImprovement * std::max(1.0, best_obj) ? 0 : stall + 1;
      best_obj = obj;
      best = cur;
    } else {
      ++stall;
    }
    // Subgradient steps are not monotone; stop after a long run without
    // meaningful improvement of the best iterate.
    if (stall >= kStallLimit) {
      best.converged = true;
      ++it;
      break;
    }
  }
  best.iterations = it;
  return best;
}

BinarySvm fit_rbf(const TrainingView& data, std::span<const double> y, const std::vector<double>& K,
                  const SvmParams& p) {
  const std::size_t n = data.rows();
  const double C = p.C;
  constexpr double kTau = 1e-12;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // Q alpha - e
  auto Q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * K[i * n + j]; };
  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
  };

  BinarySvm m;
  std::size_t it = 0;
  for (; it < p.max_iterations; ++it) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < p.tolerance) {
      m.converged = true;
      break;
    }
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += Q(t, i) * di + Q(t, j) * dj;
  }
  m.iterations = it;

  // rho as in libsvm: average over free vectors, midpoint of bounds otherwise.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    const bool at_upper = alpha[t] >= C, at_lower = alpha[t] <= 0;
    if (at_upper) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  m.bias = -rho;

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0) {
      auto x = data.row(t);
      m.support_vectors.insert(m.support_vectors.end(), x.begin(), x.end());
      m.coefficients.push_back(alpha[t] * y[t]);
    }
  }
  return m;
}

double default_gamma(const TrainingView& data) {
  const double n = static_cast<double>(data.values.size());
  if (n == 0) return 1.0;
  double mean = 0.0;
  for (double v : data.values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : data.values) var += (v - mean) * (v - mean);
  var /= n;
  return var > 0 ? 1.0 / (static_cast<double>(data.cols) * var) : 1.0;
}

}  // namespace

std::vector<double> Svm::decision_values(std::span<const double> x) const {
  std::vector<double> out(machines_.size());
  for (std::size_t c = 0; c < machines_.size(); ++c) {
    const auto& m = machines_[c];
    double v = m.bias;
    if (kernel_ == Kernel::linear) {
      v += dot(m.weights, x);
    } else {
      for (std::size_t s = 0; s < m.coefficients.size(); ++s) {
        std::span<const double> sv(m.support_vectors.data() + s * n_features_, n_features_);
        v += m.coefficients[s] * rbf(sv, x, gamma_);
      }
    }
    out[c] = v;
  }
  return out;
}

int Svm::predict(std::span<const double> x) const {
  const auto v = decision_values(x);
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

double linear_svm_objective(const BinarySvm& m, const TrainingView& data,
                            std::span<const double> y, double C) {
  return primal(m, data, y, 1.0 / (C * static_cast<double>(data.rows())));
}

Svm train_svm(const TrainingView& data, const SvmParams& params, std::size_t jobs) {
  if (!(params.C > 0.0)) throw std::invalid_argument("SVM C must be > 0");
  if (params.gamma && !(*params.gamma > 0.0)) throw std::invalid_argument("SVM gamma must be > 0");
  if (data.rows() == 0) throw std::invalid_argument("cannot fit on zero samples");
  const std::size_t n = data.rows();
  const double gamma = params.gamma.value_or(default_gamma(data));

  std::vector<double> K;
  if (params.kernel == Kernel::rbf) {
    K.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        K[i * n + j] = K[j * n + i] = rbf(data.row(i), data.row(j), gamma);
      }
    }
  }

  std::vector<BinarySvm> machines(data.n_classes);
  parallel_for(data.n_classes, jobs, [&](std::size_t c) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<std::size_t>(data.classes[i]) == c ? 1.0 : -1.0;
    }
    machines[c] = params.kernel == Kernel::linear ? fit_linear(data, y, params)
                                                  : fit_rbf(data, y, K, params);
  });
  return Svm(params.kernel, params.kernel == Kernel::rbf ? gamma : 0.0, data.cols,
             std::move(machines));
}

}  // namespace cebread::models
