#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <utility>

namespace tmds {

using scalar_t = double;
using index_t = Eigen::Index;
using seed_t = std::uint64_t;

using matrix_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, Eigen::Dynamic>;
using vector_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, 1>;
using int_matrix_t = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using bool_matrix_t = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Unordered vertex pair, stored with first < second.
using edge_t = std::pair<index_t, index_t>;

/// Number of unordered pairs among n elements.
inline index_t edge_count(index_t n) { return n * (n - 1) / 2; }

}  // namespace tmds
