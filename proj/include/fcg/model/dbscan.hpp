#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/nn/tensor.hpp"

namespace fcg::model {

struct ClusterLabeling {
  std::vector<int> labels;  // cluster id, or -1 for noise
  std::vector<bool> rare;
  std::size_t n_clusters = 0;
  double eps = 0.0;
  std::size_t min_pts = 0;
};

/// Density clustering of the rows of `points`. A point is core when at least
/// `min_pts` points (itself included) lie within `eps`. Clusters are the
/// connected components of core points; a border point joins the cluster of
/// its nearest core neighbour, so labels do not depend on row order. Rare
/// points are noise plus members of clusters holding less than
/// `rare_cluster_fraction` of all points.
template <class T>
ClusterLabeling label_rare(const nn::Tensor2<T>& points, double eps, std::size_t min_pts,
                           double rare_cluster_fraction = 0.02) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (!(eps > 0.0)) throw DomainError("label_rare: eps must be positive");
  if (min_pts < 1) throw DomainError("label_rare: min_pts must be positive");
  if (n < min_pts) throw DomainError("label_rare: fewer points than min_pts");

  const auto dist2 = [&](std::size_t a, std::size_t b) {
    return (points.row(static_cast<Eigen::Index>(a)) - points.row(static_cast<Eigen::Index>(b)))
        .template cast<double>()
        .squaredNorm();
  };
  const double eps2 = eps * eps;
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (dist2(i, j) <= eps2) nbrs[i].push_back(j);

  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= min_pts;

  ClusterLabeling out;
  out.labels.assign(n, -1);
  out.eps = eps;
  out.min_pts = min_pts;
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || out.labels[s] >= 0) continue;
    std::deque<std::size_t> queue{s};
    out.labels[s] = next;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      for (std::size_t q : nbrs[p]) {
        if (core[q] && out.labels[q] < 0) {
          out.labels[q] = next;
          queue.push_back(q);
        }
      }
    }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t q : nbrs[i]) {
      if (!core[q]) continue;
      const double d = dist2(i, q);
      if (d < best) {
        best = d;
        out.labels[i] = out.labels[q];
      }
    }
  }
  out.n_clusters = static_cast<std::size_t>(next);

  std::vector<std::size_t> sizes(out.n_clusters, 0);
  for (int l : out.labels)
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  out.rare.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int l = out.labels[i];
    out.rare[i] = l < 0 || static_cast<double>(sizes[static_cast<std::size_t>(l)]) <
                               rare_cluster_fraction * static_cast<double>(n);
  }
  return out;
}

}  // namespace fcg::model
