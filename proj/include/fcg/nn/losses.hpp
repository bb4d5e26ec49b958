#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/nn/tensor.hpp"

namespace fcg::nn {

/// Diagonal Gaussian posterior, one row per sample.
template <class T>
struct GaussianLatent {
  Tensor2<T> mean;
  Tensor2<T> log_var;
};

/// A loss value together with its gradient with respect to the prediction.
template <class T>
struct LossGrad {
  double value = 0.0;
  Tensor2<T> grad;
};

/// KL(N(mu, diag(sigma^2)) || N(0, I)) = 1/2 sum(mu^2 + sigma^2 - ln sigma^2 - 1),
/// averaged over rows.
template <class T>
double kl_divergence(const GaussianLatent<T>& z) {
  if (z.mean.rows() != z.log_var.rows() || z.mean.cols() != z.log_var.cols())
    throw ShapeError("kl_divergence: mean and log-variance shapes differ");
  if (!all_finite(z.mean) || !all_finite(z.log_var)) throw DomainError("kl_divergence: non-finite latent");
  if (z.mean.rows() == 0) return 0.0;
  const auto m = z.mean.template cast<double>().array();
  const auto lv = z.log_var.template cast<double>().array();
  const double total = 0.5 * (m.square() + lv.exp() - lv - 1.0).sum();
  return total / static_cast<double>(z.mean.rows());
}

/// Gradients of kl_divergence with respect to mean and log-variance.
template <class T>
GaussianLatent<T> kl_divergence_grad(const GaussianLatent<T>& z) {
  const T inv_rows = T(1) / static_cast<T>(z.mean.rows());
  return {z.mean * inv_rows, ((z.log_var.array().exp() - T(1)) * T(0.5) * inv_rows).matrix()};
}

/// How the reconstruction term of the VAE objective aggregates voxels.
enum class Reconstruction {
  mean_per_voxel,  // mean squared error over voxels
  sum_per_sample,  // squared error summed over a sample's voxels
};

/// Reconstruction error of x_hat against x, averaged over rows, with its gradient.
template <class T>
LossGrad<T> reconstruction_loss(const Tensor2<T>& x, const Tensor2<T>& x_hat, Reconstruction mode) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols())
    throw ShapeError("reconstruction_loss: input and reconstruction shapes differ");
  const double per = mode == Reconstruction::mean_per_voxel ? static_cast<double>(x.size())
                                                             : static_cast<double>(x.rows());
  const Tensor2<T> diff = x_hat - x;
  const double value = diff.template cast<double>().squaredNorm() / per;
  return {value, diff * static_cast<T>(2.0 / per)};
}

/// Reconstruction error plus KL divergence of the posterior.
template <class T>
double vae_loss(const Tensor2<T>& x, const Tensor2<T>& x_hat, const GaussianLatent<T>& latent,
                Reconstruction mode = Reconstruction::mean_per_voxel) {
  return reconstruction_loss(x, x_hat, mode).value + kl_divergence(latent);
}

template <class T>
double mse(const Tensor2<T>& a, const Tensor2<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("mse: shapes differ");
  if (a.size() == 0) return 0.0;
  return (a - b).template cast<double>().squaredNorm() / static_cast<double>(a.size());
}

/// MSE(z, z_hat) + lambda * MSE over the rows flagged rare. The rare term is
/// zero when no row is flagged.
template <class T>
LossGrad<T> reweighted_mse_grad(const Tensor2<T>& z, const Tensor2<T>& z_hat, const std::vector<bool>& rare_rows,
                                double lambda) {
  if (z.rows() != z_hat.rows() || z.cols() != z_hat.cols()) throw ShapeError("reweighted_mse: shapes differ");
  if (rare_rows.size() != static_cast<std::size_t>(z.rows()))
    throw ShapeError("reweighted_mse: rare mask length does not match rows");
  if (!(lambda >= 0.0)) throw DomainError("reweighted_mse: lambda must be non-negative");
  LossGrad<T> out{0.0, Tensor2<T>::Zero(z.rows(), z.cols())};
  if (z.size() == 0) return out;

  const Tensor2<T> diff = z_hat - z;
  const double n_all = static_cast<double>(z.size());
  double rare_sq = 0.0;
  std::size_t rare_count = 0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    if (rare_rows[static_cast<std::size_t>(r)]) {
      rare_sq += diff.row(r).template cast<double>().squaredNorm();
      rare_count += static_cast<std::size_t>(z.cols());
    }
  }
  out.value = diff.template cast<double>().squaredNorm() / n_all;
  out.grad = diff * static_cast<T>(2.0 / n_all);
  if (rare_count > 0 && lambda > 0.0) {
    const double n_rare = static_cast<double>(rare_count);
    out.value += lambda * rare_sq / n_rare;
    const auto w = static_cast<T>(2.0 * lambda / n_rare);
    for (Eigen::Index r = 0; r < z.rows(); ++r)
      if (rare_rows[static_cast<std::size_t>(r)]) out.grad.row(r) += w * diff.row(r);
  }
  return out;
}

template <class T>
double reweighted_mse(const Tensor2<T>& z, const Tensor2<T>& z_hat, const std::vector<bool>& rare_rows, double lambda) {
  return reweighted_mse_grad(z, z_hat, rare_rows, lambda).value;
}

}  // namespace fcg::nn
