#pragma once

// Central-difference gradient checks shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fcg/model/life.hpp"
#include "fcg/model/seq.hpp"
#include "fcg/model/vae.hpp"
#include "fcg/nn/dense.hpp"
#include "fcg/nn/lstm.hpp"

namespace gradcheck {

using M = fcg::nn::Tensor2<double>;

inline constexpr double kStep = 1e-5;
inline constexpr double kTolerance = 1e-4;

struct Probe {
  std::string name;
  M* value;
  M analytic;
};

struct Report {
  double max_rel = 0.0;
  std::size_t checked = 0;
  std::string worst;

  void merge(const Report& o) {
    if (o.max_rel > max_rel) {
      max_rel = o.max_rel;
      worst = o.worst;
    }
    checked += o.checked;
  }
  [[nodiscard]] bool ok() const { return checked > 0 && max_rel < kTolerance; }
};

inline double relative_error(double a, double n, double floor = 1e-8) {
  const double scale = std::max(std::abs(a), std::abs(n));
  if (scale < floor) return std::abs(a - n) / floor;
  return std::abs(a - n) / scale;
}

/// Compares each probe's analytic gradient with central differences of
/// `loss`. `per_block` = 0 checks every entry, otherwise a random sample.
/// Gradients smaller than `resolvable` times the loss are compared against
/// that floor instead of their own size.
inline Report compare(std::vector<Probe>& probes, const std::function<double()>& loss, std::mt19937_64& rng,
                      std::size_t per_block = 0, double resolvable = 0.0) {
  Report r;
  const double floor = std::max(1e-8, resolvable * std::abs(loss()));
  for (auto& p : probes) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p.value->size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
    if (per_block > 0 && idx.size() > per_block) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(per_block);
    }
    for (Eigen::Index i : idx) {
      double& v = p.value->data()[i];
      const double saved = v;
      v = saved + kStep;
      const double up = loss();
      v = saved - kStep;
      const double down = loss();
      v = saved;
      const double numeric = (up - down) / (2.0 * kStep);
      const double rel = relative_error(p.analytic.data()[i], numeric, floor);
      ++r.checked;
      if (rel > r.max_rel) {
        r.max_rel = rel;
        r.worst = p.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return r;
}

inline M random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  M m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

/// One dense layer with loss sum(R * y), random shape and activation.
inline Report dense_case(std::mt19937_64& rng) {
  using namespace fcg::nn;
  std::uniform_int_distribution<int> dim(1, 9);
  const Eigen::Index b = dim(rng), in = dim(rng), out = dim(rng);
  const Activation acts[] = {Activation::identity, Activation::tanh, Activation::sigmoid};
  const Activation act = acts[std::uniform_int_distribution<int>(0, 2)(rng)];
  M x = random_matrix(b, in, rng), w = random_matrix(in, out, rng), bias = random_matrix(1, out, rng);
  const M weight = random_matrix(b, out, rng);
  const M y = dense_forward(x, w, bias, act);
  const DenseGrads<double> g = dense_backward(x, w, y, weight, act);
  std::vector<Probe> probes{{"dense.input", &x, g.input}, {"dense.weights", &w, g.weights}, {"dense.bias", &bias, g.bias}};
  return compare(probes, [&] { return (dense_forward(x, w, bias, act).array() * weight.array()).sum(); }, rng);
}

/// Stacked Dense objects with cached forward/backward, including the sparse first layer.
inline Report dense_stack_case(std::mt19937_64& rng) {
  using namespace fcg::nn;
  std::uniform_int_distribution<int> dim(1, 8);
  const Eigen::Index b = dim(rng), in = dim(rng) + 2, mid = dim(rng), out = dim(rng);
  Dense<double> l1(static_cast<std::size_t>(in), static_cast<std::size_t>(mid), Activation::tanh, rng);
  Dense<double> l2(static_cast<std::size_t>(mid), static_cast<std::size_t>(out), Activation::sigmoid, rng);
  l1.bias = random_matrix(1, mid, rng, 0.5);
  M x = random_matrix(b, in, rng).cwiseMax(0.0);
  const M weight = random_matrix(b, out, rng);
  auto loss = [&] {
    const Eigen::SparseMatrix<double, Eigen::RowMajor> sx = x.sparseView();
    return (l2.forward(l1.forward_sparse(sx)).array() * weight.array()).sum();
  };
  typename Dense<double>::Cache c1, c2, c1_dense;
  const Eigen::SparseMatrix<double, Eigen::RowMajor> sx = x.sparseView();
  const M y = l2.forward(l1.forward_sparse(sx, &c1), &c2);
  const M gh = l2.backward(c2, weight);
  l1.backward_sparse(sx, c1, gh);
  std::vector<Probe> probes{{"stack.l1.weights", &l1.weights, l1.grad_weights},
                            {"stack.l1.bias", &l1.bias, l1.grad_bias},
                            {"stack.l2.weights", &l2.weights, l2.grad_weights},
                            {"stack.l2.bias", &l2.bias, l2.grad_bias}};
  // The dense path must agree with the sparse one, input gradient included.
  Dense<double> d1 = l1;
  d1.grad_weights.setZero();
  d1.grad_bias.setZero();
  d1.forward(x, &c1_dense);
  const M gx = d1.backward(c1_dense, gh);
  probes.push_back({"stack.input", &x, gx});
  Report r = compare(probes, loss, rng);
  const double rel = (d1.grad_weights - l1.grad_weights).norm() / std::max(1e-12, l1.grad_weights.norm());
  if (rel > r.max_rel) {
    r.max_rel = rel;
    r.worst = "sparse-vs-dense weights";
  }
  return r;
}

/// One LSTM step with loss sum(Rh * h) + sum(Rc * c).
inline Report lstm_case(std::mt19937_64& rng) {
  using namespace fcg::nn;
  std::uniform_int_distribution<int> dim(1, 7);
  const Eigen::Index b = dim(rng), in = dim(rng), hid = dim(rng);
  LstmParams<double> p{random_matrix(in, 4 * hid, rng), random_matrix(hid, 4 * hid, rng), random_matrix(1, 4 * hid, rng)};
  M x = random_matrix(b, in, rng), h0 = random_matrix(b, hid, rng), c0 = random_matrix(b, hid, rng);
  const M rh = random_matrix(b, hid, rng), rc = random_matrix(b, hid, rng);
  LstmStepCache<double> cache;
  lstm_cell(x, h0, c0, p, &cache);
  LstmParams<double> grads{M::Zero(in, 4 * hid), M::Zero(hid, 4 * hid), M::Zero(1, 4 * hid)};
  const LstmStepGrads<double> g = lstm_cell_backward(cache, p, rh, rc, grads);
  std::vector<Probe> probes{{"lstm.w_x", &p.w_x, grads.w_x}, {"lstm.w_h", &p.w_h, grads.w_h},
                            {"lstm.b", &p.b, grads.b},       {"lstm.x", &x, g.x},
                            {"lstm.h_prev", &h0, g.h_prev},  {"lstm.c_prev", &c0, g.c_prev}};
  return compare(probes, [&] {
    const auto [h, c] = lstm_cell(x, h0, c0, p);
    return (h.array() * rh.array()).sum() + (c.array() * rc.array()).sum();
  }, rng);
}

/// Several LSTM steps chained through the Lstm layer wrapper.
inline Report lstm_sequence_case(std::mt19937_64& rng) {
  using namespace fcg::nn;
  std::uniform_int_distribution<int> dim(1, 5);
  const Eigen::Index b = dim(rng), in = dim(rng), hid = dim(rng);
  const int steps = dim(rng) + 1;
  Lstm<double> layer(static_cast<std::size_t>(in), static_cast<std::size_t>(hid), rng);
  std::vector<M> xs, rs;
  for (int t = 0; t < steps; ++t) {
    xs.push_back(random_matrix(b, in, rng));
    rs.push_back(random_matrix(b, hid, rng));
  }
  auto run = [&](std::vector<LstmStepCache<double>>* caches) {
    M h = M::Zero(b, hid), c = M::Zero(b, hid);
    double l = 0.0;
    for (int t = 0; t < steps; ++t) {
      std::tie(h, c) = layer.step(xs[static_cast<std::size_t>(t)], h, c, caches ? &(*caches)[static_cast<std::size_t>(t)] : nullptr);
      l += (h.array() * rs[static_cast<std::size_t>(t)].array()).sum();
    }
    return l;
  };
  std::vector<LstmStepCache<double>> caches(static_cast<std::size_t>(steps));
  run(&caches);
  M dh = M::Zero(b, hid), dc = M::Zero(b, hid);
  for (int t = steps; t-- > 0;) {
    const auto g = layer.step_backward(caches[static_cast<std::size_t>(t)], M(dh + rs[static_cast<std::size_t>(t)]), dc);
    dh = g.h_prev;
    dc = g.c_prev;
  }
  std::vector<Probe> probes{{"lstm_seq.w_x", &layer.params.w_x, layer.grads.w_x},
                            {"lstm_seq.w_h", &layer.params.w_h, layer.grads.w_h},
                            {"lstm_seq.b", &layer.params.b, layer.grads.b}};
  return compare(probes, [&] { return run(nullptr); }, rng);
}

inline std::vector<Probe> snapshot(const fcg::nn::ParamList<double>& params) {
  std::vector<Probe> out;
  for (const auto& p : params) out.push_back({p.name, p.value, *p.grad});
  return out;
}

/// Full seq2seq model: teacher-forced reweighted loss through decoder, bridge and encoder.
inline Report seq_case(std::mt19937_64& rng, std::size_t per_block) {
  std::uniform_int_distribution<int> dim(1, 4);
  const auto d = static_cast<std::size_t>(dim(rng)), hid = static_cast<std::size_t>(dim(rng) + 1);
  const Eigen::Index b = dim(rng);
  const std::size_t len = static_cast<std::size_t>(dim(rng)) + 2;
  const std::size_t prefix = std::uniform_int_distribution<std::size_t>(1, len - 1)(rng);
  fcg::model::SeqModel<double> model(d, hid, rng);
  std::vector<M> seq;
  for (std::size_t t = 0; t < len; ++t) seq.push_back(random_matrix(b, static_cast<Eigen::Index>(d), rng));
  std::vector<bool> rare(static_cast<std::size_t>(b));
  for (std::size_t i = 0; i < rare.size(); ++i) rare[i] = (rng() & 1U) != 0;
  const double lambda = 3.0;
  model.zero_grad();
  model.accumulate_gradients(seq, prefix, rare, lambda);
  auto probes = snapshot(model.parameters());
  return compare(probes, [&] { return model.accumulate_gradients(seq, prefix, rare, lambda); }, rng, per_block, 1e-6);
}

/// VAE objective with fixed reparameterisation noise.
inline Report vae_case(std::mt19937_64& rng, std::size_t per_block) {
  std::uniform_int_distribution<int> dim(2, 5);
  const auto in = static_cast<std::size_t>(dim(rng) + 6), d = static_cast<std::size_t>(dim(rng));
  const std::vector<std::size_t> hidden{static_cast<std::size_t>(dim(rng) + 2), static_cast<std::size_t>(dim(rng))};
  fcg::model::Vae<double> vae(in, d, hidden, rng);
  const Eigen::Index b = dim(rng);
  const M x = random_matrix(b, static_cast<Eigen::Index>(in), rng).cwiseMax(0.0);
  const M noise = random_matrix(b, static_cast<Eigen::Index>(d), rng);
  const auto mode = (rng() & 1U) ? fcg::nn::Reconstruction::sum_per_sample : fcg::nn::Reconstruction::mean_per_voxel;
  vae.zero_grad();
  vae.accumulate_gradients(x, noise, mode);
  auto probes = snapshot(vae.parameters());
  return compare(probes, [&] { return vae.accumulate_gradients(x, noise, mode).loss; }, rng, per_block, 1e-6);
}

inline Report life_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 6);
  const auto d = static_cast<std::size_t>(dim(rng));
  fcg::model::LifeModel<double> life(d, {static_cast<std::size_t>(dim(rng)), static_cast<std::size_t>(dim(rng))}, rng);
  const Eigen::Index b = dim(rng);
  const M z = random_matrix(b, static_cast<Eigen::Index>(d), rng), y = random_matrix(b, 1, rng);
  life.zero_grad();
  life.accumulate_gradients(z, y);
  auto probes = snapshot(life.parameters());
  return compare(probes, [&] { return life.accumulate_gradients(z, y); }, rng);
}

}  // namespace gradcheck
