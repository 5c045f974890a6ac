#include "cebread/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cebread::models {

LogisticRegression::LogisticRegression(std::size_t n_classes, std::size_t n_features,
                                       std::vector<double> weights, std::vector<double> bias)
    : n_classes_(n_classes), n_features_(n_features), weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (weights_.size() != n_classes_ * n_features_ || bias_.size() != n_classes_) {
    throw std::invalid_argument("logistic regression parameter shape mismatch");
  }
}

std::vector<double> LogisticRegression::scores(std::span<const double> x) const {
  std::vector<double> s(bias_);
  for (std::size_t k = 0; k < n_classes_; ++k) {
    const double* w = weights_.data() + k * n_features_;
    for (std::size_t j = 0; j < n_features_; ++j) s[k] += w[j] * x[j];
  }
  return s;
}

std::vector<double> LogisticRegression::probabilities(std::span<const double> x) const {
  auto s = scores(x);
  const double m = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double& v : s) z += (v = std::exp(v - m));
  for (double& v : s) v /= z;
  return s;
}

int LogisticRegression::predict(std::span<const double> x) const {
  const auto s = scores(x);
  return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

namespace {

struct Params {
  std::vector<double> w;
  std::vector<double> b;
};

double penalty_value(const std::vector<double>& w, Penalty p) {
  double r = 0.0;
  for (double v : w) r += p == Penalty::l1 ? std::abs(v) : 0.5 * v * v;
  return r;
}

// Mean cross-entropy, and optionally its gradient.
double data_loss(const Params& p, const TrainingView& data, std::size_t K,
                 std::vector<double>* gw, std::vector<double>* gb) {
  const std::size_t n = data.rows(), d = data.cols;
  if (gw) std::fill(gw->begin(), gw->end(), 0.0);
  if (gb) std::fill(gb->begin(), gb->end(), 0.0);
  std::vector<double> s(K);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = data.row(i);
    for (std::size_t k = 0; k < K; ++k) {
      double v = p.b[k];
      const double* w = p.w.data() + k * d;
      for (std::size_t j = 0; j < d; ++j) v += w[j] * x[j];
      s[k] = v;
    }
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (std::size_t k = 0; k < K; ++k) z += std::exp(s[k] - m);
    const double log_z = m + std::log(z);
    const auto y = static_cast<std::size_t>(data.classes[i]);
    loss += log_z - s[y];
    if (gw) {
      for (std::size_t k = 0; k < K; ++k) {
        const double r = std::exp(s[k] - log_z) - (k == y ? 1.0 : 0.0);
        double* g = gw->data() + k * d;
        for (std::size_t j = 0; j < d; ++j) g[j] += r * x[j];
        (*gb)[k] += r;
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (gw) {
    for (double& v : *gw) v *= inv_n;
    for (double& v : *gb) v *= inv_n;
  }
  return loss * inv_n;
}

double objective(const Params& p, const TrainingView& data, std::size_t K, double lambda,
                 Penalty penalty) {
  return data_loss(p, data, K, nullptr, nullptr) + lambda * penalty_value(p.w, penalty);
}

}  // namespace

double logreg_objective(const LogisticRegression& model, const TrainingView& data,
                        const LogRegParams& params) {
  const double lambda = 1.0 / (params.C * static_cast<double>(data.rows()));
  return objective(Params{model.weights(), model.bias()}, data, model.n_classes(), lambda,
                   params.penalty);
}

LogRegFit train_logreg(const TrainingView& data, const LogRegParams& params) {
  if (!(params.C > 0.0)) throw std::invalid_argument("logistic regression C must be > 0");
  if (params.penalty == Penalty::l1 && params.solver != Solver::proximal) {
    throw std::invalid_argument("L1 penalty requires the proximal solver");
  }
  if (data.rows() == 0) throw std::invalid_argument("cannot fit on zero samples");
  const std::size_t K = data.n_classes, d = data.cols;
  const double lambda = 1.0 / (params.C * static_cast<double>(data.rows()));

  Params cur{std::vector<double>(K * d, 0.0), std::vector<double>(K, 0.0)};
  std::vector<double> gw(K * d), gb(K);
  LogRegFit fit;
  double current = objective(cur, data, K, lambda, params.penalty);
  fit.objective_history.push_back(current);

  double step = 1.0;
  constexpr int kMaxHalvings = 60;
  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    data_loss(cur, data, K, &gw, &gb);
    if (params.solver == Solver::gradient_descent) {
      for (std::size_t j = 0; j < gw.size(); ++j) gw[j] += lambda * cur.w[j];
    }
    bool accepted = false;
    Params next{cur.w, cur.b};
    double candidate = current;
    for (int h = 0; h < kMaxHalvings; ++h) {
      for (std::size_t j = 0; j < next.w.size(); ++j) {
        double v = cur.w[j] - step * gw[j];
        if (params.solver == Solver::proximal) {
          if (params.penalty == Penalty::l1) {
            const double t = step * lambda;
            v = v > t ? v - t : (v < -t ? v + t : 0.0);
          } else {
            v /= 1.0 + step * lambda;
          }
        }
        next.w[j] = v;
      }
      for (std::size_t k = 0; k < K; ++k) next.b[k] = cur.b[k] - step * gb[k];
      candidate = objective(next, data, K, lambda, params.penalty);
      if (candidate <= current) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      fit.converged = true;
      break;
    }
    const double drop = current - candidate;
    cur = std::move(next);
    current = candidate;
    fit.objective_history.push_back(current);
    fit.iterations = it + 1;
    if (drop <= params.tolerance * std::max(1.0, std::abs(current))) {
      fit.converged = true;
      break;
    }
  }
  fit.model = LogisticRegression(K, d, std::move(cur.w), std::move(cur.b));
  return fit;
}

}  // namespace cebread::models
