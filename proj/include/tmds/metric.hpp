#pragma once

#include "tmds/types.hpp"

// Distance computation, stress evaluation and alignment utilities.
//
// Conventions used throughout the library:
//  - a distance matrix is a symmetric non-negative matrix_t with zero
//    diagonal (checked by validate_distance_matrix); it is not required
//    to satisfy the triangle inequality,
//  - an embedding is an N x d matrix of row vectors,
//  - a weight matrix is symmetric and non-negative; its diagonal is
//    ignored by every consumer.
//
// Stress is reported with the single-count i<j convention. The doubled
// sum over ordered pairs is exactly twice this value and has the same
// minimizers.

namespace tmds {

/// Minkowski distance matrix of order p >= 1 between the rows of points.
/// p = 2 is the Euclidean default. Throws on non-finite input or p < 1.
matrix_t pairwise_distances(const Eigen::Ref<const matrix_t>& points, scalar_t p = 2.0);

/// Weighted raw stress: sum_{i<j} w_ij (D_ij - ||x_i - x_j||)^2.
scalar_t raw_stress(const Eigen::Ref<const matrix_t>& distances,
                    const Eigen::Ref<const matrix_t>& embedding,
                    const Eigen::Ref<const matrix_t>& weights);

/// Sammon weights w_ij = 1 / max(D_ij, epsilon). Diagonal is set to zero.
matrix_t sammon_weights(const Eigen::Ref<const matrix_t>& distances, scalar_t epsilon = 1e-9);

/// All-ones weight matrix with zero diagonal.
matrix_t uniform_weights(index_t n);

/// Aligns an embedding to a reference configuration with the similarity
/// transform (translation, rotation/reflection, uniform scale) minimizing
/// the summed squared row offsets. Throws if the embedding is degenerate
/// (all rows coincident).
matrix_t procrustes_align(const Eigen::Ref<const matrix_t>& embedding,
                          const Eigen::Ref<const matrix_t>& reference);

/// Checks symmetry, zero diagonal, finiteness and non-negativity.
/// Throws std::invalid_argument describing the first violation.
void validate_distance_matrix(const Eigen::Ref<const matrix_t>& distances);

}  // namespace tmds
