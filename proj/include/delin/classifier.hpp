#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "delin/error.hpp"
#include "delin/graph.hpp"

namespace delin {

inline constexpr double kProbFloor = 1e-6;

struct Example {
  std::vector<double> features;
  bool positive = false;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(std::span<const Example> examples) = 0;
  /// Probability of the positive class; need not be clamped.
  virtual double predict_prob(std::span<const double> features) const = 0;
  virtual std::unique_ptr<Classifier> clone() const = 0;
};

/// Logistic regression by full-batch gradient descent on standardized inputs.
class LogisticRegression final : public Classifier {
 public:
  struct Options {
    int iterations = 500;
    double step = 0.1;
  };

  LogisticRegression() = default;
  explicit LogisticRegression(Options opt) : opt_(opt) {}

  void fit(std::span<const Example> examples) override {
    if (examples.empty()) fail(ErrorCode::invalid_argument, "fit: no training examples");
    const std::size_t d = examples.front().features.size();
    for (const auto& ex : examples) {
      if (ex.features.size() != d) fail(ErrorCode::invalid_argument, "fit: inconsistent feature dimension");
    }
    const double n = static_cast<double>(examples.size());
    mean_.assign(d, 0.0);
    scale_.assign(d, 0.0);
    for (const auto& ex : examples)
      for (std::size_t j = 0; j < d; ++j) mean_[j] += ex.features[j] / n;
    for (const auto& ex : examples)
      for (std::size_t j = 0; j < d; ++j) scale_[j] += (ex.features[j] - mean_[j]) * (ex.features[j] - mean_[j]) / n;
    for (auto& s : scale_) s = s > 1e-24 ? std::sqrt(s) : 1.0;

    std::vector<std::vector<double>> z;
    z.reserve(examples.size());
    for (const auto& ex : examples) z.push_back(standardize(ex.features));
    coef_.assign(d, 0.0);
    bias_ = 0.0;
    std::vector<double> grad(d);
    for (int it = 0; it < opt_.iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double gb = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double r = sigmoid(linear(z[i])) - (examples[i].positive ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) grad[j] += r * z[i][j] / n;
        gb += r / n;
      }
      for (std::size_t j = 0; j < d; ++j) coef_[j] -= opt_.step * grad[j];
      bias_ -= opt_.step * gb;
    }
    fitted_ = true;
  }

  double predict_prob(std::span<const double> features) const override {
    if (!fitted_) fail(ErrorCode::precondition, "classifier is not fitted");
    if (features.size() != coef_.size()) fail(ErrorCode::invalid_argument, "feature dimension mismatch");
    return sigmoid(linear(standardize(features)));
  }

  std::unique_ptr<Classifier> clone() const override { return std::make_unique<LogisticRegression>(*this); }

  std::span<const double> coefficients() const { return coef_; }
  double bias() const { return bias_; }

 private:
  static double sigmoid(double t) {
    return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  }

  std::vector<double> standardize(std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean_[j]) / scale_[j];
    return z;
  }

  double linear(std::span<const double> z) const {
    double t = bias_;
    for (std::size_t j = 0; j < z.size(); ++j) t += coef_[j] * z[j];
    return t;
  }

  Options opt_;
  bool fitted_ = false;
  std::vector<double> mean_, scale_, coef_;
  double bias_ = 0.0;
};

inline double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

/// Negative log-odds of the clamped probability.
inline double weight_from_prob(double p) {
  p = clamp_prob(p);
  return -std::log(p / (1.0 - p));
}

inline WeightMap weights_from_classifier(const Classifier& C, const Graph& G) {
  WeightMap w(static_cast<std::size_t>(G.n_edges()));
  for (const auto& e : G.edges()) {
    if (e.features.empty()) fail(ErrorCode::invalid_argument, "edge " + std::to_string(e.id) + " has no features");
    w[static_cast<std::size_t>(e.id)] = weight_from_prob(C.predict_prob(e.features));
  }
  return w;
}

inline std::vector<Example> examples_for(const Graph& G, std::span<const EdgeId> ids) {
  std::vector<Example> out;
  out.reserve(ids.size());
  for (EdgeId id : ids) {
    const auto& e = G.edge(id);
    if (e.features.empty()) fail(ErrorCode::invalid_argument, "edge " + std::to_string(id) + " has no features");
    if (e.gt == GtLabel::unknown) fail(ErrorCode::invalid_argument, "edge " + std::to_string(id) + " has no label");
    out.push_back({e.features, e.gt == GtLabel::positive});
  }
  return out;
}

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual GtLabel label(EdgeId e) const = 0;
};

/// Simulated annotator answering from the graph's ground truth.
class GroundTruthOracle final : public Oracle {
 public:
  explicit GroundTruthOracle(const Graph& G) : G_(G) {
    if (!G.has_gt()) fail(ErrorCode::precondition, "simulated oracle needs ground-truth labels on every edge");
  }
  GtLabel label(EdgeId e) const override { return G_.edge(e).gt; }

 private:
  const Graph& G_;
};

}  // namespace delin
