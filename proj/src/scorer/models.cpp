#include "scsl/scorer/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "scsl/core/error.hpp"
#include "scsl/core/random.hpp"

namespace scsl::scorer {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Softmax in place; returns log-sum-exp of the input logits.
double softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (auto& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (auto& v : z) v /= s;
  return m + std::log(s);
}

void check_dim(const SparseVector& x, std::size_t input_dim) {
  if (x.dim != input_dim) {
    throw ValidationError("feature dimension " + std::to_string(x.dim) + " does not match model input " +
                          std::to_string(input_dim));
  }
}

void check_training_set(std::span<const SparseVector> features, std::span<const int> labels,
                        std::size_t classes) {
  if (features.size() != labels.size()) throw ValidationError("feature and label counts differ");
  if (features.size() < 2) throw ValidationError("training requires at least 2 examples");
  if (classes < 2) throw ValidationError("training requires at least 2 label names");
  std::set<int> seen;
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) throw ValidationError("label index out of range");
    seen.insert(y);
  }
  if (seen.size() < 2) throw ValidationError("training labels contain a single class");
  const std::size_t dim = features.front().dim;
  for (const auto& x : features) check_dim(x, dim);
}

double dot_row(std::span<const double> row, const SparseVector& x) {
  double s = 0.0;
  for (const auto& [i, v] : x.entries) s += row[i] * v;
  return s;
}

void mlp_hidden(const MlpModel& m, const SparseVector& x, std::vector<double>& pre) {
  pre.assign(m.hidden_dim, 0.0);
  for (std::size_t h = 0; h < m.hidden_dim; ++h) {
    pre[h] = m.b1[h] + dot_row(std::span(m.w1).subspan(h * m.input_dim, m.input_dim), x);
  }
}

std::vector<double> mlp_logits(const MlpModel& m, std::span<const double> hidden) {
  std::vector<double> z(m.classes());
  for (std::size_t k = 0; k < m.classes(); ++k) {
    double s = m.b2[k];
    for (std::size_t h = 0; h < m.hidden_dim; ++h) s += m.w2[k * m.hidden_dim + h] * hidden[h];
    z[k] = s;
  }
  return z;
}

void apply_step(std::span<double> params, std::span<const double> grad, double lr) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

}  // namespace

std::vector<double> LinearModel::parameters() const {
  std::vector<double> p(weights);
  p.insert(p.end(), bias.begin(), bias.end());
  return p;
}

void LinearModel::set_parameters(std::span<const double> params) {
  if (params.size() != weights.size() + bias.size()) throw ValidationError("parameter count mismatch");
  std::copy_n(params.begin(), weights.size(), weights.begin());
  std::copy(params.begin() + static_cast<std::ptrdiff_t>(weights.size()), params.end(), bias.begin());
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> p;
  p.reserve(w1.size() + b1.size() + w2.size() + b2.size());
  for (const auto* part : {&w1, &b1, &w2, &b2}) p.insert(p.end(), part->begin(), part->end());
  return p;
}

void MlpModel::set_parameters(std::span<const double> params) {
  if (params.size() != w1.size() + b1.size() + w2.size() + b2.size()) {
    throw ValidationError("parameter count mismatch");
  }
  auto it = params.begin();
  for (auto* part : {&w1, &b1, &w2, &b2}) {
    std::copy_n(it, part->size(), part->begin());
    it += static_cast<std::ptrdiff_t>(part->size());
  }
}

LossAndGradient lr_loss_and_gradient(const LinearModel& model, std::span<const SparseVector> features,
                                     std::span<const int> labels, double l2) {
  const std::size_t d = model.input_dim;
  const std::size_t rows = model.rows();
  LossAndGradient out;
  out.gradient.assign(rows * d + rows, 0.0);
  const double inv_n = 1.0 / static_cast<double>(features.size());
  std::vector<double> z(rows);

  for (std::size_t n = 0; n < features.size(); ++n) {
    const auto& x = features[n];
    check_dim(x, d);
    for (std::size_t r = 0; r < rows; ++r) {
      z[r] = model.bias[r] + dot_row(std::span(model.weights).subspan(r * d, d), x);
    }
    if (rows == 1) {
      const double y = labels[n] == 1 ? 1.0 : 0.0;
      out.loss += (softplus(z[0]) - y * z[0]) * inv_n;
      const double g = (sigmoid(z[0]) - y) * inv_n;
      for (const auto& [i, v] : x.entries) out.gradient[i] += g * v;
      out.gradient[d] += g;
    } else {
      const auto y = static_cast<std::size_t>(labels[n]);
      const double z_y = z[y];
      const double lse = softmax_inplace(z);  // z now holds probabilities
      out.loss += (lse - z_y) * inv_n;
      for (std::size_t r = 0; r < rows; ++r) {
        const double g = (z[r] - (r == y ? 1.0 : 0.0)) * inv_n;
        for (const auto& [i, v] : x.entries) out.gradient[r * d + i] += g * v;
        out.gradient[rows * d + r] += g;
      }
    }
  }
  if (l2 != 0.0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      sq += model.weights[i] * model.weights[i];
      out.gradient[i] += l2 * model.weights[i];
    }
    out.loss += 0.5 * l2 * sq;
  }
  return out;
}

LossAndGradient mlp_loss_and_gradient(const MlpModel& m, std::span<const SparseVector> features,
                                      std::span<const int> labels, double l2) {
  const std::size_t d = m.input_dim;
  const std::size_t hd = m.hidden_dim;
  const std::size_t k = m.classes();
  const std::size_t off_b1 = m.w1.size();
  const std::size_t off_w2 = off_b1 + m.b1.size();
  const std::size_t off_b2 = off_w2 + m.w2.size();
  LossAndGradient out;
  out.gradient.assign(off_b2 + m.b2.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(features.size());
  std::vector<double> pre;
  std::vector<double> hidden(hd);
  std::vector<double> dh(hd);

  for (std::size_t n = 0; n < features.size(); ++n) {
    const auto& x = features[n];
    check_dim(x, d);
    mlp_hidden(m, x, pre);
    for (std::size_t h = 0; h < hd; ++h) hidden[h] = pre[h] > 0.0 ? pre[h] : 0.0;
    auto p = mlp_logits(m, hidden);
    const auto y = static_cast<std::size_t>(labels[n]);
    const double z_y = p[y];
    const double lse = softmax_inplace(p);
    out.loss += (lse - z_y) * inv_n;

    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const double dz = (p[c] - (c == y ? 1.0 : 0.0)) * inv_n;
      for (std::size_t h = 0; h < hd; ++h) {
        out.gradient[off_w2 + c * hd + h] += dz * hidden[h];
        dh[h] += m.w2[c * hd + h] * dz;
      }
      out.gradient[off_b2 + c] += dz;
    }
    for (std::size_t h = 0; h < hd; ++h) {
      if (pre[h] <= 0.0) continue;
      for (const auto& [i, v] : x.entries) out.gradient[h * d + i] += dh[h] * v;
      out.gradient[off_b1 + h] += dh[h];
    }
  }
  if (l2 != 0.0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < m.w1.size(); ++i) {
      sq += m.w1[i] * m.w1[i];
      out.gradient[i] += l2 * m.w1[i];
    }
    for (std::size_t i = 0; i < m.w2.size(); ++i) {
      sq += m.w2[i] * m.w2[i];
      out.gradient[off_w2 + i] += l2 * m.w2[i];
    }
    out.loss += 0.5 * l2 * sq;
  }
  return out;
}

LinearModel train_lr(std::span<const SparseVector> features, std::span<const int> labels,
                     std::vector<std::string> label_names, const TrainOptions& options) {
  check_training_set(features, labels, label_names.size());
  LinearModel model;
  model.labels = std::move(label_names);
  model.input_dim = features.front().dim;
  model.weights.assign(model.rows() * model.input_dim, 0.0);
  model.bias.assign(model.rows(), 0.0);
  if (options.learning_rate == 0.0) return model;
  auto params = model.parameters();
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto lg = lr_loss_and_gradient(model, features, labels, options.l2);
    apply_step(params, lg.gradient, options.learning_rate);
    model.set_parameters(params);
  }
  return model;
}

MlpModel init_mlp(std::size_t input_dim, std::size_t hidden_dim, std::vector<std::string> label_names,
                  std::uint64_t seed) {
  if (label_names.size() != 2 && label_names.size() != 3) throw ValidationError("MLP supports 2 or 3 classes");
  if (hidden_dim == 0) throw ValidationError("hidden_dim must be >= 1");
  MlpModel m;
  m.labels = std::move(label_names);
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  Rng rng(seed);
  auto fill = [&rng](std::vector<double>& w, std::size_t count, double fan_in, double fan_out) {
    const double r = std::sqrt(6.0 / (fan_in + fan_out));
    w.resize(count);
    for (auto& v : w) v = (2.0 * uniform_unit(rng) - 1.0) * r;
  };
  fill(m.w1, hidden_dim * input_dim, static_cast<double>(input_dim), static_cast<double>(hidden_dim));
  m.b1.assign(hidden_dim, 0.0);
  fill(m.w2, m.classes() * hidden_dim, static_cast<double>(hidden_dim), static_cast<double>(m.classes()));
  m.b2.assign(m.classes(), 0.0);
  return m;
}

MlpModel train_mlp(std::span<const SparseVector> features, std::span<const int> labels,
                   std::vector<std::string> label_names, const TrainOptions& options) {
  check_training_set(features, labels, label_names.size());
  auto model = init_mlp(features.front().dim, options.hidden_dim, std::move(label_names), options.seed);
  if (options.learning_rate == 0.0) return model;
  auto params = model.parameters();
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto lg = mlp_loss_and_gradient(model, features, labels, options.l2);
    apply_step(params, lg.gradient, options.learning_rate);
    model.set_parameters(params);
  }
  return model;
}

MajorityModel train_majority(std::span<const int> labels, std::vector<std::string> label_names,
                             std::size_t input_dim) {
  if (labels.empty()) throw ValidationError("majority baseline needs at least one label");
  std::vector<std::size_t> counts(label_names.size(), 0);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= counts.size()) throw ValidationError("label index out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  MajorityModel m;
  m.labels = std::move(label_names);
  m.input_dim = input_dim;
  m.predicted = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  return m;
}

std::vector<double> predict_proba(const LinearModel& model, const SparseVector& x) {
  check_dim(x, model.input_dim);
  const std::size_t d = model.input_dim;
  if (model.rows() == 1) {
    const double p = sigmoid(model.bias[0] + dot_row(model.weights, x));
    return {1.0 - p, p};
  }
  std::vector<double> z(model.rows());
  for (std::size_t r = 0; r < z.size(); ++r) {
    z[r] = model.bias[r] + dot_row(std::span(model.weights).subspan(r * d, d), x);
  }
  softmax_inplace(z);
  return z;
}

std::vector<double> predict_proba(const MlpModel& model, const SparseVector& x) {
  check_dim(x, model.input_dim);
  std::vector<double> pre;
  mlp_hidden(model, x, pre);
  for (auto& v : pre) v = v > 0.0 ? v : 0.0;
  auto z = mlp_logits(model, pre);
  softmax_inplace(z);
  return z;
}

std::vector<double> predict_proba(const MajorityModel& model, const SparseVector& x) {
  check_dim(x, model.input_dim);
  std::vector<double> p(model.labels.size(), 0.0);
  p[model.predicted] = 1.0;
  return p;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace scsl::scorer
