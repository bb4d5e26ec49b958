#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/nn/tensor.hpp"

namespace fcg::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-7;
};

template <class T>
struct AdamState {
  AdamConfig config;
  std::vector<Tensor2<T>> first_moment;
  std::vector<Tensor2<T>> second_moment;
  std::uint64_t step = 0;

  explicit AdamState(AdamConfig cfg = {}) : config(cfg) {
    if (!(config.beta1 >= 0.0 && config.beta1 < 1.0) || !(config.beta2 >= 0.0 && config.beta2 < 1.0))
      throw DomainError("AdamState: betas must lie in [0, 1)");
  }
};

/// Bias-corrected Adam update of every block from its accumulated gradient.
/// All gradients are checked before anything is modified, so a poisoned
/// update leaves parameters and moments untouched.
template <class T>
void adam_step(AdamState<T>& state, const ParamList<T>& params) {
  for (const auto& p : params) {
    if (p.grad->rows() != p.value->rows() || p.grad->cols() != p.value->cols())
      throw ShapeError("adam_step: gradient shape mismatch for '" + p.name + "'");
    if (!all_finite(*p.grad)) throw PoisonedUpdateError("adam_step: non-finite gradient in '" + p.name + "'");
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.push_back(Tensor2<T>::Zero(p.value->rows(), p.value->cols()));
      state.second_moment.push_back(Tensor2<T>::Zero(p.value->rows(), p.value->cols()));
    }
  }
  if (state.first_moment.size() != params.size()) throw ShapeError("adam_step: parameter list changed");

  ++state.step;
  const auto& c = state.config;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const auto b1 = static_cast<T>(c.beta1);
  const auto b2 = static_cast<T>(c.beta2);
  const auto lr = static_cast<T>(c.learning_rate);
  const auto eps = static_cast<T>(c.epsilon);
  const auto inv_c1 = static_cast<T>(1.0 / correction1);
  const auto inv_c2 = static_cast<T>(1.0 / correction2);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    const auto& g = *params[k].grad;
    if (m.rows() != g.rows() || m.cols() != g.cols()) throw ShapeError("adam_step: moment shape mismatch");
    T* w = params[k].value->data();
    T* mp = m.data();
    T* vp = v.data();
    const T* gp = g.data();
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      mp[i] = b1 * mp[i] + (T(1) - b1) * gp[i];
      vp[i] = b2 * vp[i] + (T(1) - b2) * gp[i] * gp[i];
      w[i] -= lr * (mp[i] * inv_c1) / (std::sqrt(vp[i] * inv_c2) + eps);
    }
  }
}

}  // namespace fcg::nn
