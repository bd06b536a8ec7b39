#pragma once

#include "tmds/types.hpp"

#include <string>
#include <utility>
#include <vector>

// Ground-truth scenario generators. Every generator is a pure function
// of its parameters and seed.

namespace tmds {

/// n i.i.d. uniform samples from [0,1]^dim, filled row by row.
matrix_t sample_hypercube(index_t n, index_t dim, seed_t seed);

/// Replaces m distinct unordered pairs with the value of another
/// uniformly drawn off-diagonal entry of the original matrix (never the
/// pair itself). Returns the contaminated matrix and the replaced pairs,
/// sorted. 0 <= m <= N(N-1)/2.
std::pair<matrix_t, std::vector<edge_t>> inject_outliers(
    const Eigen::Ref<const matrix_t>& distances, index_t m, seed_t seed);

/// Multiplies every unordered pair by an i.i.d. factor exp(sigma * Z),
/// Z standard normal. The factor has unit median (and geometric mean);
/// its arithmetic mean is exp(sigma^2 / 2). sigma = 0 returns the input
/// unchanged.
matrix_t lognormal_distort(const Eigen::Ref<const matrix_t>& distances, scalar_t sigma,
                           seed_t seed);

enum class ShapeKind { plus, spiral };

/// 2-D structured point sets. plus: uniform on two perpendicular unit
/// segments through the origin (exactly collinear when jitter = 0).
/// spiral: three-turn Archimedean arc, angle sampled uniformly, radius
/// growing linearly to 1. Gaussian jitter with the given standard
/// deviation is added per coordinate. n >= 4.
matrix_t shape_points(ShapeKind kind, index_t n, scalar_t jitter, seed_t seed);

/// Scales one symmetric entry by 2^log2_factor.
matrix_t deform_edge(const Eigen::Ref<const matrix_t>& distances, index_t i, index_t j,
                     scalar_t log2_factor);

/// Generator parameters; serialized next to every bundle so observed_d
/// can be reconstructed from true_d.
struct ScenarioMeta {
  std::string kind = "hypercube";  // hypercube | plus | spiral
  index_t n = 0;
  index_t dim = 2;       // hypercube only; shapes are 2-D
  scalar_t scale = 1.0;  // multiplies the sampled coordinates
  scalar_t jitter = 0.0;
  seed_t seed = 0;

  // distortions; at most one may be active
  scalar_t outlier_rate = 0.0;  // fraction of the N(N-1)/2 edges
  index_t outlier_count = -1;   // takes precedence over rate when >= 0
  scalar_t lognormal_sigma = 0.0;
  index_t deform_i = -1, deform_j = -1;
  scalar_t deform_log2 = 0.0;
};

struct Scenario {
  matrix_t points;
  matrix_t true_d;
  matrix_t observed_d;
  std::vector<edge_t> outliers;  // distorted pairs (empty for lognormal)
  ScenarioMeta meta;
};

/// Builds a scenario from meta. Substreams: points use mix_seed(seed, 1),
/// injection mix_seed(seed, 2), lognormal mix_seed(seed, 3). meta's
/// outlier_count is resolved to the actual injected count.
Scenario make_scenario(const ScenarioMeta& meta);

}  // namespace tmds
