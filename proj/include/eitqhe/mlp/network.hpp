#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "eitqhe/error.hpp"
#include "eitqhe/rng.hpp"

// Fully connected regression network. Batches are column-major: one sample per
// column, so a layer computes Z = W A + b.
namespace eitqhe::mlp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kInputSize = 9;
inline constexpr int kOutputSize = 6;

enum class Activation { Tanh, Relu };

inline std::string_view to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }

inline Activation parse_activation(std::string_view s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  throw Error(ErrorKind::UsageError, fmt::format("activation '{}' is not tanh|relu", s));
}

struct MLPModel {
  std::vector<int> layer_sizes;  // input, hidden..., output
  Activation activation = Activation::Tanh;
  std::uint64_t seed = 0;
  std::vector<Matrix> weights;  // layer k: size_k x size_{k-1}
  std::vector<Vector> biases;

  std::size_t layers() const { return weights.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
    return n;
  }
};

/// Parameter-shaped container used for gradients and Adam moments.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static Gradients zeros_like(const MLPModel& m) {
    Gradients g;
    for (std::size_t k = 0; k < m.layers(); ++k) {
      g.weights.push_back(Matrix::Zero(m.weights[k].rows(), m.weights[k].cols()));
      g.biases.push_back(Vector::Zero(m.biases[k].size()));
    }
    return g;
  }
};

inline void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2 || sizes.front() != kInputSize || sizes.back() != kOutputSize) {
    throw Error(ErrorKind::BadShape, "layer sizes must start at 9 and end at 6");
  }
  for (int s : sizes) {
    if (s < 1) throw Error(ErrorKind::BadShape, fmt::format("layer size {}", s));
  }
}

/// Glorot-uniform weights, zero biases.
inline MLPModel init_network(const std::vector<int>& layer_sizes, Activation activation,
                             std::uint64_t seed) {
  check_sizes(layer_sizes);
  MLPModel m;
  m.layer_sizes = layer_sizes;
  m.activation = activation;
  m.seed = seed;
  Rng rng(seed);
  for (std::size_t k = 1; k < layer_sizes.size(); ++k) {
    const int fan_in = layer_sizes[k - 1];
    const int fan_out = layer_sizes[k];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Vector::Zero(fan_out));
  }
  return m;
}

inline void activate(Activation a, Matrix& z) {
  if (a == Activation::Tanh) {
    z = z.array().tanh().matrix();
  } else {
    z = z.cwiseMax(0.0);
  }
}

/// Activations of every layer; acts[0] is the input, acts.back() the output.
inline std::vector<Matrix> forward_all(const MLPModel& m, const Matrix& x) {
  if (x.rows() != m.layer_sizes.front()) {
    throw Error(ErrorKind::ShapeMismatch, fmt::format("input has {} rows", x.rows()));
  }
  if (!x.allFinite()) throw Error(ErrorKind::NonFiniteInput, "input contains NaN or inf");
  std::vector<Matrix> acts;
  acts.reserve(m.layers() + 1);
  acts.push_back(x);
  for (std::size_t k = 0; k < m.layers(); ++k) {
    Matrix z = m.weights[k] * acts.back();
    z.colwise() += m.biases[k];
    if (k + 1 < m.layers()) activate(m.activation, z);
    acts.push_back(std::move(z));
  }
  return acts;
}

inline Matrix forward(const MLPModel& m, const Matrix& x) { return std::move(forward_all(m, x).back()); }

inline Vector forward(const MLPModel& m, const Vector& x) {
  return forward(m, Matrix(x)).col(0);
}

struct Metrics {
  double loss = 0.0;  // mean squared error
  double mae = 0.0;
};

/// N counts every scalar output (rows x columns).
inline Metrics loss_and_mae(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "prediction and target shapes differ");
  }
  if (pred.size() == 0) throw Error(ErrorKind::ShapeMismatch, "empty batch");
  const auto diff = (pred - target).array();
  const double n = static_cast<double>(pred.size());
  return {diff.square().sum() / n, diff.abs().sum() / n};
}

/// Gradient of the MSE loss with respect to every parameter.
inline Gradients backward(const MLPModel& m, const Matrix& x, const Matrix& y) {
  auto acts = forward_all(m, x);
  if (y.rows() != acts.back().rows() || y.cols() != x.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "target shape does not match the batch");
  }
  if (x.cols() == 0) throw Error(ErrorKind::ShapeMismatch, "empty batch");
  Gradients g;
  g.weights.resize(m.layers());
  g.biases.resize(m.layers());
  Matrix delta = (acts.back() - y) * (2.0 / static_cast<double>(y.size()));
  for (std::size_t k = m.layers(); k-- > 0;) {
    g.weights[k].noalias() = delta * acts[k].transpose();
    g.biases[k] = delta.rowwise().sum();
    if (k == 0) break;
    Matrix back = m.weights[k].transpose() * delta;
    const auto& a = acts[k];
    if (m.activation == Activation::Tanh) {
      delta = back.array() * (1.0 - a.array().square());
    } else {
      delta = back.array() * (a.array() > 0.0).cast<double>();
    }
  }
  return g;
}

struct AdamState {
  Gradients m;
  Gradients v;
  std::int64_t t = 0;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_model(const MLPModel& model, double learning_rate) {
    AdamState s;
    s.m = Gradients::zeros_like(model);
    s.v = Gradients::zeros_like(model);
    s.learning_rate = learning_rate;
    return s;
  }
};

namespace detail {

template <typename P, typename G, typename S>
void adam_update(P& param, const G& grad, S& m, S& v, const AdamState& s, double c1, double c2) {
  m = s.beta1 * m + (1.0 - s.beta1) * grad;
  v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
  param.array() -= s.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + s.epsilon);
}

}  // namespace detail

/// theta_t = theta_{t-1} - eta mhat_t / (sqrt(vhat_t) + eps), t incremented first.
inline void adam_step(AdamState& state, MLPModel& model, const Gradients& grads) {
  if (grads.weights.size() != model.layers() || state.m.weights.size() != model.layers()) {
    throw Error(ErrorKind::ShapeMismatch, "gradient layer count differs from model");
  }
  for (std::size_t k = 0; k < model.layers(); ++k) {
    if (grads.weights[k].rows() != model.weights[k].rows() ||
        grads.weights[k].cols() != model.weights[k].cols() ||
        grads.biases[k].size() != model.biases[k].size()) {
      throw Error(ErrorKind::ShapeMismatch, fmt::format("layer {} gradient shape", k));
    }
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < model.layers(); ++k) {
    detail::adam_update(model.weights[k], grads.weights[k], state.m.weights[k], state.v.weights[k],
                        state, c1, c2);
    detail::adam_update(model.biases[k], grads.biases[k], state.m.biases[k], state.v.biases[k],
                        state, c1, c2);
  }
}

}  // namespace eitqhe::mlp
