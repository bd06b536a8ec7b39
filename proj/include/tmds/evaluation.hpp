#pragma once

#include "tmds/types.hpp"

#include <vector>

// Detection and embedding quality measures, plus the closed-form break
// probability for uniform hypercube data and its Monte-Carlo validators.

namespace tmds {

struct DetectionReport {
  long long true_positives = 0;
  long long false_positives = 0;
  long long false_negatives = 0;
  long long true_negatives = 0;
  scalar_t precision = 1.0;  // 1 when nothing was retrieved
  scalar_t recall = 1.0;     // 1 when there is nothing to retrieve
};

/// Edges with keep == false are the retrieved set; truth holds the
/// actually distorted pairs. The four counts partition the edge set.
DetectionReport detection_report(const bool_matrix_t& keep, const std::vector<edge_t>& truth);

struct EmbeddingScore {
  scalar_t value = 0.0;  // mean |log(embedded / reference distance)|; lower is better
  long long used_pairs = 0;
  long long excluded_pairs = 0;  // either distance below 1e-12
};

/// Scale-symmetric embedding quality: shrinking by c and stretching by c
/// score the same. Throws if every pair is excluded.
EmbeddingScore embedding_score(const Eigen::Ref<const matrix_t>& reference_distances,
                               const Eigen::Ref<const matrix_t>& embedding);

struct ShepardRow {
  scalar_t input_distance = 0.0;
  scalar_t embedded_distance = 0.0;
  bool flagged = false;
};

/// One row per unordered pair in lexicographic (i, j) order.
std::vector<ShepardRow> shepard_data(const Eigen::Ref<const matrix_t>& observed_distances,
                                     const Eigen::Ref<const matrix_t>& embedding,
                                     const bool_matrix_t& keep);

/// Standard normal CDF, absolute error well below 1e-7.
scalar_t normal_cdf(scalar_t x);

/// Probability that a triangle of uniform hypercube points with one edge
/// replaced by an independent fresh distance is broken, under the normal
/// approximation of the distance distribution:
///   2 Phi(-mu / (sqrt(2.73) sigma)) + Phi(-mu / (sqrt(3.27) sigma))
/// with mu = sqrt(dim / 6) and sigma^2 = 7 / 120.
scalar_t break_probability_theory(index_t dim);

struct McEstimate {
  scalar_t value = 0.0;
  scalar_t halfwidth = 0.0;  // 95% binomial, normal approximation
  long long trials = 0;
};

/// Direct simulation of the same event: per trial, sample p1, p2, p3
/// uniformly in [0,1]^dim and replace D(p1,p3) by the distance of two
/// fresh uniform points; report the broken fraction.
McEstimate break_probability_mc(index_t dim, long long trials, seed_t seed);

/// Monte-Carlo Cov(D(p1,p2), D(p2,p3)) for uniform hypercube triples.
scalar_t distance_covariance_mc(index_t dim, long long trials, seed_t seed);

}  // namespace tmds
