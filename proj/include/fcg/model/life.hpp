#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/nn/dense.hpp"
#include "fcg/nn/losses.hpp"
#include "fcg/nn/tensor.hpp"

namespace fcg::model {

/// Dense regressor from a frame latent to remaining life. The network works
/// on z-scored targets; `predict` maps back to cycles with the stored stats.
template <class T>
class LifeModel {
 public:
  using Tensor = nn::Tensor2<T>;

  LifeModel() = default;

  template <class Rng>
  LifeModel(std::size_t latent_dim, const std::vector<std::size_t>& hidden, Rng& rng) : latent_dim_(latent_dim) {
    if (hidden.empty()) throw DomainError("LifeModel: need at least one hidden layer");
    std::size_t in = latent_dim;
    for (std::size_t h : hidden) {
      layers_.emplace_back(in, h, nn::Activation::tanh, rng);
      in = h;
    }
    layers_.emplace_back(in, 1, nn::Activation::identity, rng);
  }

  [[nodiscard]] std::size_t latent_dim() const { return latent_dim_; }
  [[nodiscard]] double target_mean() const { return mean_; }
  [[nodiscard]] double target_std() const { return std_; }

  void set_normalization(double mean, double std_dev) {
    if (!(std_dev > 0.0)) throw DegenerateTargetError("LifeModel: target standard deviation must be positive");
    mean_ = mean;
    std_ = std_dev;
  }

  /// Normalised output, one row per latent.
  Tensor forward(const Tensor& z, std::vector<typename nn::Dense<T>::Cache>* caches = nullptr) const {
    if (static_cast<std::size_t>(z.cols()) != latent_dim_) throw ShapeError("LifeModel: latent size mismatch");
    if (caches != nullptr) caches->resize(layers_.size());
    Tensor h = z;
    for (std::size_t i = 0; i < layers_.size(); ++i)
      h = layers_[i].forward(h, caches != nullptr ? &(*caches)[i] : nullptr);
    return h;
  }

  /// Remaining life in cycles for each latent row.
  std::vector<double> predict(const Tensor& z) const {
    const Tensor y = forward(z);
    std::vector<double> out(static_cast<std::size_t>(y.rows()));
    for (Eigen::Index r = 0; r < y.rows(); ++r) out[static_cast<std::size_t>(r)] = mean_ + std_ * static_cast<double>(y(r, 0));
    return out;
  }

  /// MSE on normalised targets (batch x 1); gradients accumulate.
  double accumulate_gradients(const Tensor& z, const Tensor& target) {
    std::vector<typename nn::Dense<T>::Cache> caches;
    const Tensor y = forward(z, &caches);
    nn::expect_shape(target, y.rows(), 1, "LifeModel target");
    const Tensor diff = y - target;
    const double loss = diff.template cast<double>().squaredNorm() / static_cast<double>(diff.size());
    Tensor g = diff * static_cast<T>(2.0 / static_cast<double>(diff.size()));
    for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i].backward(caches[i], g);
    return loss;
  }

  nn::ParamList<T> parameters() {
    nn::ParamList<T> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i].collect(out, "life." + std::to_string(i));
    return out;
  }

  void zero_grad() { nn::zero_grads(parameters()); }

  [[nodiscard]] std::vector<std::size_t> hidden_sizes() const {
    std::vector<std::size_t> h;
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) h.push_back(layers_[i].out_size());
    return h;
  }

 private:
  std::size_t latent_dim_ = 0;
  double mean_ = 0.0;
  double std_ = 1.0;
  std::vector<nn::Dense<T>> layers_;
};

}  // namespace fcg::model
