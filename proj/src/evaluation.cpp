#include "tmds/evaluation.hpp"

#include "tmds/rng.hpp"
#include "tmds/triangle.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace tmds {

DetectionReport detection_report(const bool_matrix_t& keep, const std::vector<edge_t>& truth) {
  const index_t n = keep.rows();
  if (keep.cols() != n) throw std::invalid_argument("detection_report: mask not square");
  const std::set<edge_t> truth_set(truth.begin(), truth.end());

  DetectionReport report;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const bool retrieved = !keep(i, j);
      const bool is_outlier = truth_set.count({i, j}) > 0;
      if (retrieved && is_outlier) ++report.true_positives;
      else if (retrieved) ++report.false_positives;
      else if (is_outlier) ++report.false_negatives;
      else ++report.true_negatives;
    }
  }
  const long long retrieved = report.true_positives + report.false_positives;
  const long long relevant = report.true_positives + report.false_negatives;
  report.precision = retrieved == 0 ? 1.0
                                    : static_cast<scalar_t>(report.true_positives) /
                                          static_cast<scalar_t>(retrieved);
  report.recall = relevant == 0 ? 1.0
                                : static_cast<scalar_t>(report.true_positives) /
                                      static_cast<scalar_t>(relevant);
  return report;
}

EmbeddingScore embedding_score(const Eigen::Ref<const matrix_t>& reference_distances,
                               const Eigen::Ref<const matrix_t>& embedding) {
  const index_t n = reference_distances.rows();
  if (reference_distances.cols() != n || embedding.rows() != n) {
    throw std::invalid_argument("embedding_score: dimension mismatch");
  }
  constexpr scalar_t kFloor = 1e-12;

  EmbeddingScore score;
  scalar_t sum = 0.0;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const scalar_t ref = reference_distances(i, j);
      const scalar_t emb = (embedding.row(i) - embedding.row(j)).norm();
      if (ref < kFloor || emb < kFloor) {
        ++score.excluded_pairs;
      } else {
        sum += std::abs(std::log(emb / ref));
        ++score.used_pairs;
      }
    }
  }
  if (score.used_pairs == 0) throw std::runtime_error("embedding_score: every pair excluded");
  score.value = sum / static_cast<scalar_t>(score.used_pairs);
  return score;
}

std::vector<ShepardRow> shepard_data(const Eigen::Ref<const matrix_t>& observed_distances,
                                     const Eigen::Ref<const matrix_t>& embedding,
                                     const bool_matrix_t& keep) {
  const index_t n = observed_distances.rows();
  if (observed_distances.cols() != n || embedding.rows() != n || keep.rows() != n ||
      keep.cols() != n) {
    throw std::invalid_argument("shepard_data: dimension mismatch");
  }
  std::vector<ShepardRow> rows;
  rows.reserve(static_cast<std::size_t>(edge_count(n)));
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      rows.push_back({observed_distances(i, j), (embedding.row(i) - embedding.row(j)).norm(),
                      !keep(i, j)});
    }
  }
  return rows;
}

scalar_t normal_cdf(scalar_t x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

scalar_t break_probability_theory(index_t dim) {
  if (dim < 1) throw std::invalid_argument("break_probability_theory: dim must be >= 1");
  const scalar_t mu = std::sqrt(static_cast<scalar_t>(dim) / 6.0);
  const scalar_t sigma = std::sqrt(7.0 / 120.0);
  return 2.0 * normal_cdf(-mu / (std::sqrt(2.73) * sigma)) +
         normal_cdf(-mu / (std::sqrt(3.27) * sigma));
}

namespace {

inline scalar_t uniform_point_distance(rng_t& gen, index_t dim, std::vector<scalar_t>& a) {
  // draws two fresh points, returns their distance; a is scratch
  for (index_t k = 0; k < dim; ++k) a[k] = unit_uniform(gen);
  scalar_t s = 0.0;
  for (index_t k = 0; k < dim; ++k) {
    const scalar_t d = a[k] - unit_uniform(gen);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

McEstimate break_probability_mc(index_t dim, long long trials, seed_t seed) {
  if (dim < 1) throw std::invalid_argument("break_probability_mc: dim must be >= 1");
  if (trials < 1) throw std::invalid_argument("break_probability_mc: trials must be >= 1");

  rng_t gen(seed);
  std::vector<scalar_t> p1(dim), p2(dim), p3(dim), scratch(dim);
  long long broken = 0;
  for (long long t = 0; t < trials; ++t) {
    for (index_t k = 0; k < dim; ++k) p1[k] = unit_uniform(gen);
    for (index_t k = 0; k < dim; ++k) p2[k] = unit_uniform(gen);
    for (index_t k = 0; k < dim; ++k) p3[k] = unit_uniform(gen);
    scalar_t d12 = 0.0, d23 = 0.0;
    for (index_t k = 0; k < dim; ++k) {
      const scalar_t a = p1[k] - p2[k];
      const scalar_t b = p2[k] - p3[k];
      d12 += a * a;
      d23 += b * b;
    }
    d12 = std::sqrt(d12);
    d23 = std::sqrt(d23);
    // the (p1, p3) edge is the outlier: an independent fresh distance
    const scalar_t replaced = uniform_point_distance(gen, dim, scratch);
    if (is_broken(d12, d23, replaced, 0.0)) ++broken;
  }

  McEstimate estimate;
  estimate.trials = trials;
  estimate.value = static_cast<scalar_t>(broken) / static_cast<scalar_t>(trials);
  estimate.halfwidth =
      1.96 * std::sqrt(estimate.value * (1.0 - estimate.value) / static_cast<scalar_t>(trials));
  return estimate;
}

scalar_t distance_covariance_mc(index_t dim, long long trials, seed_t seed) {
  if (dim < 1) throw std::invalid_argument("distance_covariance_mc: dim must be >= 1");
  if (trials < 1) throw std::invalid_argument("distance_covariance_mc: trials must be >= 1");

  rng_t gen(seed);
  std::vector<scalar_t> p1(dim), p2(dim), p3(dim);
  scalar_t sum_x = 0.0, sum_y = 0.0, sum_xy = 0.0;
  for (long long t = 0; t < trials; ++t) {
    for (index_t k = 0; k < dim; ++k) p1[k] = unit_uniform(gen);
    for (index_t k = 0; k < dim; ++k) p2[k] = unit_uniform(gen);
    for (index_t k = 0; k < dim; ++k) p3[k] = unit_uniform(gen);
    scalar_t x = 0.0, y = 0.0;
    for (index_t k = 0; k < dim; ++k) {
      const scalar_t a = p1[k] - p2[k];
      const scalar_t b = p2[k] - p3[k];
      x += a * a;
      y += b * b;
    }
    x = std::sqrt(x);
    y = std::sqrt(y);
    sum_x += x;
    sum_y += y;
    sum_xy += x * y;
  }
  const scalar_t tn = static_cast<scalar_t>(trials);
  return (sum_xy - sum_x * sum_y / tn) / std::max(tn - 1.0, 1.0);
}

}  // namespace tmds
