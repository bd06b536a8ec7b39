#pragma once

#include "tmds/triangle.hpp"
#include "tmds/types.hpp"

#include <vector>

// Stress-majorization solvers.
//
// smacof() iterates the weighted Guttman transform; its stress trace is
// non-increasing (majorization guarantee) and every solver here is a
// deterministic function of its inputs and SolverConfig.

namespace tmds {

struct InitSpec {
  enum class Kind { classical, random, given };
  Kind kind = Kind::classical;
  matrix_t coords;  // used by Kind::given

  static InitSpec Classical() { return {}; }
  static InitSpec Random() { return {Kind::random, {}}; }
  static InitSpec Given(matrix_t x0) { return {Kind::given, std::move(x0)}; }
};

struct SolverConfig {
  int max_iters = 300;
  scalar_t rel_stress_tol = 1e-6;  // stop when (S_prev - S) / S_prev < tol
  InitSpec init;                   // classical by default (deterministic)
  seed_t seed = 0;                 // drives random init
};

struct SmacofResult {
  matrix_t embedding;
  std::vector<scalar_t> stress_trace;  // stress_trace[0] is the initial stress
  int iterations = 0;
};

struct ClassicalInitResult {
  matrix_t coords;
  index_t positive_directions = 0;
  bool padded = false;  // fewer than dim usable spectral directions
};

struct TmdsEmbedResult {
  matrix_t embedding;
  bool_matrix_t keep;  // mask actually used by the solver
  TriangleCounts counts;
  BreakHistogram histogram;
  int phi_selected = 0;
  bool fallback = false;
  int phi_used = 0;
  bool reconnected = false;  // phi was raised to restore weight-graph connectivity
  std::vector<scalar_t> stress_trace;
};

struct Fg12Result {
  matrix_t embedding;
  matrix_t outlier_offsets;  // symmetric, zero diagonal
  long long nonzero_count = 0;
  std::vector<scalar_t> objective_trace;
};

/// Torgerson-style deterministic initialization: double-centers the
/// squared distances and embeds along the top-dim spectral directions.
/// Directions with non-positive spectrum are padded with zeros and
/// flagged. Requires dim < N.
ClassicalInitResult classical_init(const Eigen::Ref<const matrix_t>& distances, index_t dim);

/// Weighted stress majorization from the configured initial layout.
/// Throws if the positive-weight graph is disconnected (a symptom of
/// over-filtering) or if dim >= N.
SmacofResult smacof(const Eigen::Ref<const matrix_t>& distances,
                    const Eigen::Ref<const matrix_t>& weights, index_t dim,
                    const SolverConfig& config);

/// Filter then embed: tmds_filter() -> 0/1 weights -> smacof(). If the
/// kept-edge graph is disconnected, phi is raised to the smallest value
/// restoring connectivity and the adjustment is flagged.
TmdsEmbedResult tmds_embed(const Eigen::Ref<const matrix_t>& distances, index_t dim,
                           const FilterMode& mode, const SolverConfig& config,
                           scalar_t rel_tol = kDefaultBreakTol);

/// smacof() with Sammon weights 1 / max(D_ij, epsilon).
SmacofResult sammon_embed(const Eigen::Ref<const matrix_t>& distances, index_t dim,
                          const SolverConfig& config, scalar_t epsilon = 1e-9);

/// Baseline that models outliers explicitly: minimizes
///   sum_{i<j} (D_ij - ||x_i - x_j|| - O_ij)^2 + lambda |{O_ij != 0}|
/// by alternating an exact hard-threshold step in O with a smacof pass
/// on D - O. lambda is scale-dependent on D. Requires lambda > 0.
Fg12Result fg12_embed(const Eigen::Ref<const matrix_t>& distances, index_t dim, scalar_t lambda,
                      const SolverConfig& config);

/// True iff the graph of strictly positive weights is connected.
bool positive_weight_graph_connected(const Eigen::Ref<const matrix_t>& weights);

/// Smallest phi whose keep-graph {count <= phi} is connected.
int connectivity_threshold(const TriangleCounts& counts);

/// 0/1 weights from a keep-mask, zero diagonal.
matrix_t mask_to_weights(const bool_matrix_t& keep);

/// Resolves the configured initial layout for the given problem.
matrix_t initial_embedding(const Eigen::Ref<const matrix_t>& distances, index_t dim,
                           const SolverConfig& config);

}  // namespace tmds
