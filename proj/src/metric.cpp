#include "tmds/metric.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace tmds {

matrix_t pairwise_distances(const Eigen::Ref<const matrix_t>& points, scalar_t p) {
  if (!points.allFinite()) throw std::invalid_argument("pairwise_distances: non-finite coordinates");
  if (!(p >= 1.0)) throw std::invalid_argument("pairwise_distances: Minkowski order must be >= 1");

  const index_t n = points.rows();
  matrix_t d = matrix_t::Zero(n, n);
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const auto diff = points.row(i) - points.row(j);
      scalar_t dist;
      if (p == 2.0) {
        dist = diff.norm();
      } else if (p == 1.0) {
        dist = diff.cwiseAbs().sum();
      } else {
        dist = std::pow(diff.cwiseAbs().array().pow(p).sum(), 1.0 / p);
      }
      d(i, j) = d(j, i) = dist;
    }
  }
  return d;
}

scalar_t raw_stress(const Eigen::Ref<const matrix_t>& distances,
                    const Eigen::Ref<const matrix_t>& embedding,
                    const Eigen::Ref<const matrix_t>& weights) {
  const index_t n = distances.rows();
  if (distances.cols() != n || weights.rows() != n || weights.cols() != n ||
      embedding.rows() != n) {
    throw std::invalid_argument("raw_stress: dimension mismatch");
  }
  scalar_t stress = 0.0;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const scalar_t r = distances(i, j) - (embedding.row(i) - embedding.row(j)).norm();
      stress += weights(i, j) * r * r;
    }
  }
  return stress;
}

matrix_t sammon_weights(const Eigen::Ref<const matrix_t>& distances, scalar_t epsilon) {
  matrix_t w = distances.cwiseMax(epsilon).cwiseInverse();
  w.diagonal().setZero();
  return w;
}

matrix_t uniform_weights(index_t n) {
  matrix_t w = matrix_t::Ones(n, n);
  w.diagonal().setZero();
  return w;
}

matrix_t procrustes_align(const Eigen::Ref<const matrix_t>& embedding,
                          const Eigen::Ref<const matrix_t>& reference) {
  if (embedding.rows() != reference.rows() || embedding.cols() != reference.cols()) {
    throw std::invalid_argument("procrustes_align: shape mismatch");
  }
  const auto x_mean = embedding.colwise().mean();
  const auto r_mean = reference.colwise().mean();
  const matrix_t xc = embedding.rowwise() - x_mean;
  const matrix_t rc = reference.rowwise() - r_mean;

  const scalar_t x_norm2 = xc.squaredNorm();
  if (x_norm2 <= 0.0) throw std::invalid_argument("procrustes_align: degenerate point set");

  // Orthogonal factor (reflections allowed) and the trace-optimal scale.
  Eigen::JacobiSVD<matrix_t> svd(xc.transpose() * rc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const matrix_t rot = svd.matrixU() * svd.matrixV().transpose();
  const scalar_t scale = svd.singularValues().sum() / x_norm2;

  return ((scale * xc * rot).rowwise() + r_mean).eval();
}

void validate_distance_matrix(const Eigen::Ref<const matrix_t>& distances) {
  const index_t n = distances.rows();
  if (distances.cols() != n) throw std::invalid_argument("distance matrix: not square");
  if (!distances.allFinite()) throw std::invalid_argument("distance matrix: non-finite entry");
  for (index_t i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0) throw std::invalid_argument("distance matrix: nonzero diagonal");
    for (index_t j = i + 1; j < n; ++j) {
      if (distances(i, j) < 0.0) throw std::invalid_argument("distance matrix: negative entry");
      if (distances(i, j) != distances(j, i)) {
        throw std::invalid_argument("distance matrix: not symmetric");
      }
    }
  }
}

}  // namespace tmds
