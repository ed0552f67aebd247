#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scsl/scorer/sparse.hpp"

namespace scsl::scorer {

/// Logistic regression. Binary models keep one weight row and use the
/// sigmoid; with three or more labels there is one row per class and a
/// softmax. labels[0] is the negative class and labels[1] the positive one.
struct LinearModel {
  std::vector<std::string> labels;
  std::size_t input_dim = 0;
  std::vector<double> weights;  // rows() x input_dim, row-major
  std::vector<double> bias;     // rows()

  [[nodiscard]] std::size_t classes() const { return labels.size(); }
  [[nodiscard]] std::size_t rows() const { return labels.size() == 2 ? 1 : labels.size(); }

  [[nodiscard]] std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// One hidden rectifier layer followed by a softmax output.
struct MlpModel {
  std::vector<std::string> labels;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<double> w1;  // hidden x input
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // classes x hidden
  std::vector<double> b2;  // classes

  [[nodiscard]] std::size_t classes() const { return labels.size(); }

  [[nodiscard]] std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

/// Always predicts the most frequent training label.
struct MajorityModel {
  std::vector<std::string> labels;
  std::size_t input_dim = 0;
  std::size_t predicted = 0;

  friend bool operator==(const MajorityModel&, const MajorityModel&) = default;
};

struct TrainOptions {
  std::size_t epochs = 200;
  double learning_rate = 0.5;
  double l2 = 0.0;
  std::size_t hidden_dim = 256;
  std::uint64_t seed = 0;
};

/// Full-batch gradient descent from zero weights on the mean logistic loss
/// plus (l2 / 2) * |W|^2 (bias not penalized).
LinearModel train_lr(std::span<const SparseVector> features, std::span<const int> labels,
                     std::vector<std::string> label_names, const TrainOptions& options);

/// Full-batch gradient descent on mean cross-entropy plus (l2 / 2) * |W|^2.
/// Weights start uniform in [-r, r], r = sqrt(6 / (fan_in + fan_out)); biases 0.
MlpModel train_mlp(std::span<const SparseVector> features, std::span<const int> labels,
                   std::vector<std::string> label_names, const TrainOptions& options);

MajorityModel train_majority(std::span<const int> labels, std::vector<std::string> label_names,
                             std::size_t input_dim);

MlpModel init_mlp(std::size_t input_dim, std::size_t hidden_dim, std::vector<std::string> label_names,
                  std::uint64_t seed);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as parameters()
};

LossAndGradient lr_loss_and_gradient(const LinearModel& model, std::span<const SparseVector> features,
                                     std::span<const int> labels, double l2);
LossAndGradient mlp_loss_and_gradient(const MlpModel& model, std::span<const SparseVector> features,
                                      std::span<const int> labels, double l2);

/// Class probabilities in label order. Throws ValidationError on a
/// dimension mismatch.
std::vector<double> predict_proba(const LinearModel& model, const SparseVector& x);
std::vector<double> predict_proba(const MlpModel& model, const SparseVector& x);
std::vector<double> predict_proba(const MajorityModel& model, const SparseVector& x);

std::size_t argmax(std::span<const double> values);

}  // namespace scsl::scorer
