#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fcg/nn/dense.hpp"
#include "fcg/nn/tensor.hpp"

namespace fcg::nn {

/// Gate pre-activations are packed [input | forget | cell | output], each H wide.
template <class T>
struct LstmParams {
  Tensor2<T> w_x;  // in x 4H
  Tensor2<T> w_h;  // H x 4H
  Tensor2<T> b;    // 1 x 4H

  [[nodiscard]] Eigen::Index hidden() const { return w_h.rows(); }
};

template <class T>
struct LstmStepCache {
  Tensor2<T> x, h_prev, c_prev;
  Tensor2<T> i, f, g, o;
  Tensor2<T> c, tanh_c;
};

template <class T>
struct LstmStepGrads {
  Tensor2<T> x, h_prev, c_prev;
};

/// One LSTM step over a batch: i,f,o = sigmoid, g = tanh,
/// c = f*c_prev + i*g, h = o*tanh(c).
template <class T>
std::pair<Tensor2<T>, Tensor2<T>> lstm_cell(const Tensor2<T>& x, const Tensor2<T>& h_prev, const Tensor2<T>& c_prev,
                                            const LstmParams<T>& p, LstmStepCache<T>* cache = nullptr) {
  const Eigen::Index H = p.hidden();
  if (x.cols() != p.w_x.rows()) throw ShapeError("lstm_cell: input width does not match parameters");
  if (h_prev.cols() != H || c_prev.cols() != H || h_prev.rows() != x.rows() || c_prev.rows() != x.rows())
    throw ShapeError("lstm_cell: state shape mismatch");
  if (p.w_x.cols() != 4 * H || p.w_h.cols() != 4 * H || p.b.cols() != 4 * H || p.b.rows() != 1)
    throw ShapeError("lstm_cell: malformed parameters");

  Tensor2<T> z = x * p.w_x + h_prev * p.w_h;
  z.rowwise() += p.b.row(0);
  Tensor2<T> i = activate(Activation::sigmoid, Tensor2<T>(z.middleCols(0, H)));
  Tensor2<T> f = activate(Activation::sigmoid, Tensor2<T>(z.middleCols(H, H)));
  Tensor2<T> g = activate(Activation::tanh, Tensor2<T>(z.middleCols(2 * H, H)));
  Tensor2<T> o = activate(Activation::sigmoid, Tensor2<T>(z.middleCols(3 * H, H)));
  Tensor2<T> c = (f.array() * c_prev.array() + i.array() * g.array()).matrix();
  Tensor2<T> tanh_c = c.array().tanh().matrix();
  Tensor2<T> h = (o.array() * tanh_c.array()).matrix();
  if (cache != nullptr) {
    *cache = {x, h_prev, c_prev, std::move(i), std::move(f), std::move(g), std::move(o), c, std::move(tanh_c)};
  }
  return {std::move(h), std::move(c)};
}

/// Backward through one step. `dh`, `dc` are dL/dh and dL/dc arriving from
/// above and from the next step; parameter gradients accumulate into `grads`.
template <class T>
LstmStepGrads<T> lstm_cell_backward(const LstmStepCache<T>& k, const LstmParams<T>& p, const Tensor2<T>& dh,
                                    const Tensor2<T>& dc, LstmParams<T>& grads) {
  const Eigen::Index H = p.hidden();
  const Eigen::Index B = k.x.rows();
  const auto one = T(1);
  Tensor2<T> dc_total = (dc.array() + dh.array() * k.o.array() * (one - k.tanh_c.array().square())).matrix();
  Tensor2<T> dz(B, 4 * H);
  dz.middleCols(0, H) = (dc_total.array() * k.g.array() * k.i.array() * (one - k.i.array())).matrix();
  dz.middleCols(H, H) = (dc_total.array() * k.c_prev.array() * k.f.array() * (one - k.f.array())).matrix();
  dz.middleCols(2 * H, H) = (dc_total.array() * k.i.array() * (one - k.g.array().square())).matrix();
  dz.middleCols(3 * H, H) = (dh.array() * k.tanh_c.array() * k.o.array() * (one - k.o.array())).matrix();

  grads.w_x.noalias() += k.x.transpose() * dz;
  grads.w_h.noalias() += k.h_prev.transpose() * dz;
  grads.b += dz.colwise().sum();
  return {dz * p.w_x.transpose(), dz * p.w_h.transpose(), (dc_total.array() * k.f.array()).matrix()};
}

/// An LSTM layer: parameters, gradient accumulators and step-wise evaluation.
template <class T>
struct Lstm {
  LstmParams<T> params;
  LstmParams<T> grads;

  Lstm() = default;
  template <class Rng>
  Lstm(std::size_t in, std::size_t hidden, Rng& rng) {
    const auto H = static_cast<Eigen::Index>(hidden);
    params.w_x.resize(static_cast<Eigen::Index>(in), 4 * H);
    params.w_h.resize(H, 4 * H);
    xavier_uniform(params.w_x, in, 4 * hidden, rng);
    xavier_uniform(params.w_h, hidden, 4 * hidden, rng);
    params.b = Tensor2<T>::Zero(1, 4 * H);
    params.b.middleCols(H, H).setConstant(T(1));  // forget gate starts open
    grads = {Tensor2<T>::Zero(params.w_x.rows(), params.w_x.cols()), Tensor2<T>::Zero(H, 4 * H),
             Tensor2<T>::Zero(1, 4 * H)};
  }

  [[nodiscard]] std::size_t hidden() const { return static_cast<std::size_t>(params.hidden()); }
  [[nodiscard]] std::size_t in_size() const { return static_cast<std::size_t>(params.w_x.rows()); }

  std::pair<Tensor2<T>, Tensor2<T>> step(const Tensor2<T>& x, const Tensor2<T>& h, const Tensor2<T>& c,
                                         LstmStepCache<T>* cache = nullptr) const {
    return lstm_cell(x, h, c, params, cache);
  }
  LstmStepGrads<T> step_backward(const LstmStepCache<T>& cache, const Tensor2<T>& dh, const Tensor2<T>& dc) {
    return lstm_cell_backward(cache, params, dh, dc, grads);
  }

  void collect(ParamList<T>& out, const std::string& prefix) {
    out.push_back({prefix + ".w_x", &params.w_x, &grads.w_x});
    out.push_back({prefix + ".w_h", &params.w_h, &grads.w_h});
    out.push_back({prefix + ".b", &params.b, &grads.b});
  }
};

}  // namespace fcg::nn
