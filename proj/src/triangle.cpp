#include "tmds/triangle.hpp"

#include "tmds/metric.hpp"
#include "tmds/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tmds {

namespace {

// Sorts to d1 <= d2 <= d3 and tests d1 + d2 < d3 (1 - tol).
inline bool broken_raw(scalar_t x, scalar_t y, scalar_t z, scalar_t rel_tol) {
  if (x > y) std::swap(x, y);
  if (y > z) std::swap(y, z);
  if (x > y) std::swap(x, y);
  return x + y < z * (1.0 - rel_tol);
}

void require_counting_input(const Eigen::Ref<const matrix_t>& distances) {
  validate_distance_matrix(distances);
  if (distances.rows() < 3) throw std::invalid_argument("broken-triangle count: need N >= 3");
}

}  // namespace

bool is_broken(scalar_t d1, scalar_t d2, scalar_t d3, scalar_t rel_tol) {
  if (d1 < 0.0 || d2 < 0.0 || d3 < 0.0) throw std::invalid_argument("is_broken: negative length");
  return broken_raw(d1, d2, d3, rel_tol);
}

TriangleCounts count_broken_exact(const Eigen::Ref<const matrix_t>& distances, scalar_t rel_tol) {
  require_counting_input(distances);
  const index_t n = distances.rows();

  TriangleCounts tc;
  tc.n = n;
  tc.count = int_matrix_t::Zero(n, n);
  tc.tested = int_matrix_t::Constant(n, n, static_cast<int>(n - 2));
  tc.tested.diagonal().setZero();

  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const scalar_t dij = distances(i, j);
      for (index_t k = j + 1; k < n; ++k) {
        if (broken_raw(dij, distances(i, k), distances(j, k), rel_tol)) {
          ++tc.count(i, j), ++tc.count(j, i);
          ++tc.count(i, k), ++tc.count(k, i);
          ++tc.count(j, k), ++tc.count(k, j);
        }
      }
    }
  }
  return tc;
}

TriangleCounts count_broken_sampled(const Eigen::Ref<const matrix_t>& distances,
                                    int triangles_per_edge, seed_t seed, scalar_t rel_tol) {
  require_counting_input(distances);
  if (triangles_per_edge < 1) {
    throw std::invalid_argument("count_broken_sampled: triangles_per_edge must be >= 1");
  }
  const index_t n = distances.rows();
  const int per_edge = static_cast<int>(std::min<index_t>(triangles_per_edge, n - 2));

  TriangleCounts tc;
  tc.n = n;
  tc.count = int_matrix_t::Zero(n, n);
  tc.tested = int_matrix_t::Constant(n, n, per_edge);
  tc.tested.diagonal().setZero();

  std::vector<index_t> candidates(n - 2);
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      index_t m = 0;
      for (index_t k = 0; k < n; ++k) {
        if (k != i && k != j) candidates[m++] = k;
      }
      // Partial Fisher-Yates over the substream of this edge.
      rng_t gen(mix_seed(seed, static_cast<seed_t>(i), static_cast<seed_t>(j)));
      const scalar_t dij = distances(i, j);
      int broken = 0;
      for (int s = 0; s < per_edge; ++s) {
        const auto pick = s + static_cast<index_t>(uniform_below(gen, n - 2 - s));
        std::swap(candidates[s], candidates[pick]);
        const index_t k = candidates[s];
        if (broken_raw(dij, distances(i, k), distances(j, k), rel_tol)) ++broken;
      }
      tc.count(i, j) = tc.count(j, i) = broken;
    }
  }
  return tc;
}

int default_triangles_per_edge(index_t n, scalar_t expected_outliers) {
  const scalar_t rule = 2.0 * expected_outliers / static_cast<scalar_t>(n);
  const index_t want = std::max<index_t>(45, static_cast<index_t>(std::ceil(rule)));
  return static_cast<int>(std::min(want, n - 2));
}

BreakHistogram build_histogram(const TriangleCounts& counts) {
  BreakHistogram h;
  h.edge_total = edge_count(counts.n);
  for (index_t i = 0; i < counts.n; ++i) {
    for (index_t j = i + 1; j < counts.n; ++j) {
      ++h.bins[counts.count(i, j)];
    }
  }
  return h;
}

ThresholdPick select_threshold(const BreakHistogram& histogram) {
  const auto bin = [&histogram](int b) {
    const auto it = histogram.bins.find(b);
    return it == histogram.bins.end() ? 0LL : it->second;
  };
  const int max_bin = histogram.bins.empty() ? 0 : histogram.bins.rbegin()->first;

  long long cumulative = 0;
  for (int phi = 0; phi <= max_bin; ++phi) {
    cumulative += bin(phi);
    if (2 * cumulative >= histogram.edge_total && bin(phi + 1) > bin(phi)) {
      return {phi, false};
    }
  }
  return {max_bin, true};
}

bool_matrix_t filter_mask(const TriangleCounts& counts, int phi) {
  if (phi < 0) throw std::invalid_argument("filter_mask: phi must be >= 0");
  bool_matrix_t keep = (counts.count.array() <= phi);
  keep.diagonal().setConstant(true);
  return keep;
}

FilterResult tmds_filter(const Eigen::Ref<const matrix_t>& distances, const FilterMode& mode,
                         scalar_t rel_tol) {
  FilterResult result;
  result.counts = mode.kind == FilterMode::Kind::exact
                      ? count_broken_exact(distances, rel_tol)
                      : count_broken_sampled(distances, mode.triangles_per_edge, mode.seed, rel_tol);
  result.histogram = build_histogram(result.counts);
  const ThresholdPick pick = select_threshold(result.histogram);
  result.phi = pick.phi;
  result.fallback = pick.fallback;
  result.keep = filter_mask(result.counts, result.phi);
  return result;
}

std::vector<std::tuple<index_t, index_t, int>> flagged_edges(const TriangleCounts& counts,
                                                             int phi) {
  std::vector<std::tuple<index_t, index_t, int>> out;
  for (index_t i = 0; i < counts.n; ++i) {
    for (index_t j = i + 1; j < counts.n; ++j) {
      if (counts.count(i, j) > phi) out.emplace_back(i, j, counts.count(i, j));
    }
  }
  return out;
}

}  // namespace tmds
