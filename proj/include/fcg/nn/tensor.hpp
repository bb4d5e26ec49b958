#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "fcg/errors.hpp"

namespace fcg::nn {

/// Row-major dense matrix. Batches are stacked along rows.
template <class T>
using Tensor2 = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
bool all_finite(const Tensor2<T>& m) {
  const T* p = m.data();
  bool ok = true;
  for (Eigen::Index i = 0; i < m.size(); ++i) ok &= std::isfinite(p[i]);
  return ok;
}

template <class T>
void expect_shape(const Tensor2<T>& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                     ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

/// A named parameter block and its gradient accumulator.
template <class T>
struct ParamRef {
  std::string name;
  Tensor2<T>* value = nullptr;
  Tensor2<T>* grad = nullptr;
};

template <class T>
using ParamList = std::vector<ParamRef<T>>;

template <class T>
void zero_grads(const ParamList<T>& params) {
  for (const auto& p : params) p.grad->setZero();
}

/// Glorot-uniform fill, U(-r, r) with r = sqrt(6 / (fan_in + fan_out)).
template <class T, class Rng>
void xavier_uniform(Tensor2<T>& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-r, r);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(u(rng));
}

}  // namespace fcg::nn
