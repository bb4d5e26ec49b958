#pragma once

#include <cstddef>
#include <string>

#include <Eigen/SparseCore>

#include "fcg/nn/tensor.hpp"

namespace fcg::nn {

enum class Activation { identity, tanh, sigmoid, relu };

template <class T>
Tensor2<T> activate(Activation act, const Tensor2<T>& pre) {
  switch (act) {
    case Activation::identity: return pre;
    case Activation::tanh: return pre.array().tanh().matrix();
    case Activation::sigmoid: return (T(1) / (T(1) + (-pre.array()).exp())).matrix();
    case Activation::relu: return pre.cwiseMax(T(0));
  }
  return pre;
}

/// d(activation)/d(pre-activation), written in terms of the activation output.
template <class T>
Tensor2<T> activation_slope(Activation act, const Tensor2<T>& out) {
  switch (act) {
    case Activation::identity: return Tensor2<T>::Ones(out.rows(), out.cols());
    case Activation::tanh: return (T(1) - out.array().square()).matrix();
    case Activation::sigmoid: return (out.array() * (T(1) - out.array())).matrix();
    case Activation::relu: return (out.array() > T(0)).template cast<T>().matrix();
  }
  return Tensor2<T>::Ones(out.rows(), out.cols());
}

template <class T>
struct DenseGrads {
  Tensor2<T> input;
  Tensor2<T> weights;
  Tensor2<T> bias;
};

/// output = act(input * weights + bias); input is batch x in, weights in x out, bias 1 x out.
template <class T>
Tensor2<T> dense_forward(const Tensor2<T>& input, const Tensor2<T>& weights, const Tensor2<T>& bias,
                         Activation act) {
  if (input.cols() != weights.rows()) throw ShapeError("dense_forward: input width does not match weights");
  if (bias.rows() != 1 || bias.cols() != weights.cols()) throw ShapeError("dense_forward: bias shape mismatch");
  Tensor2<T> pre = input * weights;
  pre.rowwise() += bias.row(0);
  return activate(act, pre);
}

/// Exact gradients of a dense layer given its input, its output and dL/doutput.
template <class T>
DenseGrads<T> dense_backward(const Tensor2<T>& input, const Tensor2<T>& weights, const Tensor2<T>& output,
                             const Tensor2<T>& grad_output, Activation act) {
  if (grad_output.rows() != output.rows() || grad_output.cols() != output.cols())
    throw ShapeError("dense_backward: gradient shape does not match output");
  const Tensor2<T> delta = (grad_output.array() * activation_slope(act, output).array()).matrix();
  return {delta * weights.transpose(), input.transpose() * delta, delta.colwise().sum()};
}

/// Dense layer owning its parameters and gradient accumulators.
template <class T>
struct Dense {
  Tensor2<T> weights;
  Tensor2<T> bias;
  Tensor2<T> grad_weights;
  Tensor2<T> grad_bias;
  Activation activation = Activation::identity;

  struct Cache {
    Tensor2<T> input;
    Tensor2<T> output;
  };

  Dense() = default;
  template <class Rng>
  Dense(std::size_t in, std::size_t out, Activation act, Rng& rng)
      : weights(in, out), bias(Tensor2<T>::Zero(1, out)), activation(act) {
    xavier_uniform(weights, in, out, rng);
    grad_weights = Tensor2<T>::Zero(in, out);
    grad_bias = Tensor2<T>::Zero(1, out);
  }

  [[nodiscard]] std::size_t in_size() const { return static_cast<std::size_t>(weights.rows()); }
  [[nodiscard]] std::size_t out_size() const { return static_cast<std::size_t>(weights.cols()); }

  Tensor2<T> forward(const Tensor2<T>& x, Cache* cache = nullptr) const {
    Tensor2<T> y = dense_forward(x, weights, bias, activation);
    if (cache != nullptr) {
      cache->input = x;
      cache->output = y;
    }
    return y;
  }

  /// Accumulates parameter gradients; returns dL/dinput.
  Tensor2<T> backward(const Cache& cache, const Tensor2<T>& grad_output) {
    if (grad_output.rows() != cache.output.rows() || grad_output.cols() != cache.output.cols())
      throw ShapeError("dense_backward: gradient shape does not match output");
    const Tensor2<T> delta = (grad_output.array() * activation_slope(activation, cache.output).array()).matrix();
    grad_weights.noalias() += cache.input.transpose() * delta;
    grad_bias += delta.colwise().sum();
    Tensor2<T> grad_input;
    grad_input.noalias() = delta * weights.transpose();
    return grad_input;
  }

  /// Forward over a sparse batch. Only the output is cached.
  Tensor2<T> forward_sparse(const Eigen::SparseMatrix<T, Eigen::RowMajor>& x, Cache* cache = nullptr) const {
    if (x.cols() != weights.rows()) throw ShapeError("dense_forward: input width does not match weights");
    Tensor2<T> pre = x * weights;
    pre.rowwise() += bias.row(0);
    Tensor2<T> y = activate(activation, pre);
    if (cache != nullptr) cache->output = y;
    return y;
  }

  /// Parameter gradients for a sparse input batch; no input gradient.
  void backward_sparse(const Eigen::SparseMatrix<T, Eigen::RowMajor>& x, const Cache& cache,
                       const Tensor2<T>& grad_output) {
    if (grad_output.rows() != cache.output.rows() || grad_output.cols() != cache.output.cols())
      throw ShapeError("dense_backward: gradient shape does not match output");
    const Tensor2<T> delta = (grad_output.array() * activation_slope(activation, cache.output).array()).matrix();
    grad_weights.noalias() += x.transpose() * delta;
    grad_bias += delta.colwise().sum();
  }

  void collect(ParamList<T>& out, const std::string& prefix) {
    out.push_back({prefix + ".weights", &weights, &grad_weights});
    out.push_back({prefix + ".bias", &bias, &grad_bias});
  }
};

}  // namespace fcg::nn
