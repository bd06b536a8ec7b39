#pragma once

#include "tmds/types.hpp"

#include <map>
#include <tuple>
#include <vector>

// Broken-triangle counting and the count-based outlier filter.
//
// A triangle with side lengths d1 <= d2 <= d3 is "broken" when
// d1 + d2 < d3 (the triangle inequality fails strictly). Edges of a
// distance matrix that participate in many broken triangles are flagged
// as outliers: the per-edge counts are histogrammed, a threshold phi is
// picked from the histogram shape, and edges with count > phi are
// removed from the keep-mask.

namespace tmds {

/// Relative slack applied to the broken test so exact degenerate
/// configurations (d1 + d2 == d3, e.g. collinear points) do not register
/// as violations under floating point.
inline constexpr scalar_t kDefaultBreakTol = 1e-9;

struct TriangleCounts {
  index_t n = 0;
  int_matrix_t count;   // broken triangles each edge participates in
  int_matrix_t tested;  // triangles examined per edge (N-2 in exact mode)
};

struct BreakHistogram {
  std::map<int, long long> bins;  // broken-count b -> number of edges
  long long edge_total = 0;       // N(N-1)/2
};

struct ThresholdPick {
  int phi = 0;
  bool fallback = false;  // no bin satisfied both requirements; nothing filtered
};

struct FilterMode {
  enum class Kind { exact, sampled };
  Kind kind = Kind::exact;
  int triangles_per_edge = 0;
  seed_t seed = 0;

  static FilterMode Exact() { return {}; }
  static FilterMode Sampled(int triangles_per_edge, seed_t seed) {
    return {Kind::sampled, triangles_per_edge, seed};
  }
};

struct FilterResult {
  bool_matrix_t keep;  // true = edge kept (inlier); symmetric, diagonal true
  TriangleCounts counts;
  BreakHistogram histogram;
  int phi = 0;
  bool fallback = false;
};

/// True iff the triangle with these side lengths is broken. Inputs need
/// not be sorted; negative lengths throw.
bool is_broken(scalar_t d1, scalar_t d2, scalar_t d3, scalar_t rel_tol = kDefaultBreakTol);

/// Exhaustive O(N^3) count: every broken triple {i,j,k} increments the
/// counts of all three participating edges. tested is N-2 everywhere.
TriangleCounts count_broken_exact(const Eigen::Ref<const matrix_t>& distances,
                                  scalar_t rel_tol = kDefaultBreakTol);

/// Subsampled count: each edge draws min(triangles_per_edge, N-2) third
/// vertices uniformly without replacement and counts only its own broken
/// triangles, so per-edge break rates stay unbiased. Each edge uses a
/// substream seeded from (seed, i, j); results do not depend on the
/// order edges are processed in.
TriangleCounts count_broken_sampled(const Eigen::Ref<const matrix_t>& distances,
                                    int triangles_per_edge, seed_t seed,
                                    scalar_t rel_tol = kDefaultBreakTol);

/// Rule-of-thumb sample size: at least 45 triangles per edge, or twice
/// the expected outlier count spread over the N vertices, capped at N-2.
int default_triangles_per_edge(index_t n, scalar_t expected_outliers = 0.0);

BreakHistogram build_histogram(const TriangleCounts& counts);

/// Smallest phi with (1) at least half of all edges having count <= phi
/// and (2) bins[phi+1] > bins[phi], absent bins reading as zero. The
/// cumulative requirement includes the b = 0 bin so that clean data is
/// handled. If no phi in [0, max observed count] satisfies both, returns
/// the max observed count with fallback = true (nothing is filtered).
ThresholdPick select_threshold(const BreakHistogram& histogram);

/// keep[i][j] = (count[i][j] <= phi); diagonal true.
bool_matrix_t filter_mask(const TriangleCounts& counts, int phi);

/// Full filter pipeline: count -> histogram -> threshold -> mask.
FilterResult tmds_filter(const Eigen::Ref<const matrix_t>& distances, const FilterMode& mode,
                         scalar_t rel_tol = kDefaultBreakTol);

/// Edges with count > phi as (i, j, count) triples, i < j, row order.
std::vector<std::tuple<index_t, index_t, int>> flagged_edges(const TriangleCounts& counts,
                                                             int phi);

}  // namespace tmds
