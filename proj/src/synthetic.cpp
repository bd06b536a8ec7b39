#include "tmds/synthetic.hpp"

#include "tmds/metric.hpp"
#include "tmds/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace tmds {

matrix_t sample_hypercube(index_t n, index_t dim, seed_t seed) {
  if (n < 1 || dim < 1) throw std::invalid_argument("sample_hypercube: n and dim must be >= 1");
  rng_t gen(seed);
  matrix_t points(n, dim);
  for (index_t i = 0; i < n; ++i) {
    for (index_t k = 0; k < dim; ++k) points(i, k) = unit_uniform(gen);
  }
  return points;
}

std::pair<matrix_t, std::vector<edge_t>> inject_outliers(
    const Eigen::Ref<const matrix_t>& distances, index_t m, seed_t seed) {
  validate_distance_matrix(distances);
  const index_t n = distances.rows();
  const index_t total = edge_count(n);
  if (m < 0 || m > total) throw std::invalid_argument("inject_outliers: m out of range");

  matrix_t out = distances;
  std::vector<edge_t> chosen;
  if (m == 0) return {std::move(out), std::move(chosen)};

  std::vector<index_t> pair_ids(total);
  {
    index_t t = 0;
    for (index_t i = 0; i < n; ++i) {
      for (index_t j = i + 1; j < n; ++j) pair_ids[t++] = i * n + j;
    }
  }

  rng_t gen(seed);
  chosen.reserve(static_cast<std::size_t>(m));
  // Partial Fisher-Yates picks m distinct target pairs; each target then
  // draws a source pair (!= itself) from the original matrix.
  for (index_t s = 0; s < m; ++s) {
    const index_t pick = s + static_cast<index_t>(uniform_below(gen, total - s));
    std::swap(pair_ids[s], pair_ids[pick]);
    const index_t ti = pair_ids[s] / n, tj = pair_ids[s] % n;

    index_t si = ti, sj = tj;
    while (si == ti && sj == tj) {
      index_t flat = static_cast<index_t>(uniform_below(gen, total));
      // unrank a flat id in [0, total) to an (i < j) pair
      si = 0;
      while (flat >= n - 1 - si) flat -= n - 1 - si, ++si;
      sj = si + 1 + flat;
    }
    out(ti, tj) = out(tj, ti) = distances(si, sj);
    chosen.emplace_back(ti, tj);
  }
  std::sort(chosen.begin(), chosen.end());
  return {std::move(out), std::move(chosen)};
}

matrix_t lognormal_distort(const Eigen::Ref<const matrix_t>& distances, scalar_t sigma,
                           seed_t seed) {
  validate_distance_matrix(distances);
  if (sigma < 0.0) throw std::invalid_argument("lognormal_distort: sigma must be >= 0");
  matrix_t out = distances;
  if (sigma == 0.0) return out;

  rng_t gen(seed);
  const index_t n = distances.rows();
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const scalar_t factor = std::exp(sigma * standard_normal(gen));
      out(i, j) = out(j, i) = distances(i, j) * factor;
    }
  }
  return out;
}

matrix_t shape_points(ShapeKind kind, index_t n, scalar_t jitter, seed_t seed) {
  if (n < 4) throw std::invalid_argument("shape_points: need n >= 4");
  rng_t gen(seed);
  matrix_t points(n, 2);
  for (index_t i = 0; i < n; ++i) {
    scalar_t x = 0.0, y = 0.0;
    if (kind == ShapeKind::plus) {
      const scalar_t t = 2.0 * unit_uniform(gen) - 1.0;
      if (gen() & 1ULL) {
        x = t;
      } else {
        y = t;
      }
    } else {
      const scalar_t theta = unit_uniform(gen) * 6.0 * 3.14159265358979323846;
      const scalar_t r = theta / (6.0 * 3.14159265358979323846);
      x = r * std::cos(theta);
      y = r * std::sin(theta);
    }
    if (jitter > 0.0) {
      x += jitter * standard_normal(gen);
      y += jitter * standard_normal(gen);
    }
    points(i, 0) = x;
    points(i, 1) = y;
  }
  return points;
}

matrix_t deform_edge(const Eigen::Ref<const matrix_t>& distances, index_t i, index_t j,
                     scalar_t log2_factor) {
  const index_t n = distances.rows();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) {
    throw std::invalid_argument("deform_edge: bad edge indices");
  }
  matrix_t out = distances;
  out(i, j) = out(j, i) = distances(i, j) * std::exp2(log2_factor);
  return out;
}

Scenario make_scenario(const ScenarioMeta& meta) {
  Scenario sc;
  sc.meta = meta;

  const seed_t point_seed = mix_seed(meta.seed, 1);
  if (meta.kind == "hypercube") {
    sc.points = sample_hypercube(meta.n, meta.dim, point_seed);
  } else if (meta.kind == "plus") {
    sc.points = shape_points(ShapeKind::plus, meta.n, meta.jitter, point_seed);
    sc.meta.dim = 2;
  } else if (meta.kind == "spiral") {
    sc.points = shape_points(ShapeKind::spiral, meta.n, meta.jitter, point_seed);
    sc.meta.dim = 2;
  } else {
    throw std::invalid_argument("make_scenario: unknown kind '" + meta.kind + "'");
  }
  if (meta.scale != 1.0) sc.points *= meta.scale;

  sc.true_d = pairwise_distances(sc.points, 2.0);
  sc.observed_d = sc.true_d;

  const index_t m = meta.outlier_count >= 0
                        ? meta.outlier_count
                        : static_cast<index_t>(meta.outlier_rate *
                                               static_cast<scalar_t>(edge_count(meta.n)));
  const bool wants_injection = m > 0;
  const bool wants_lognormal = meta.lognormal_sigma > 0.0;
  const bool wants_deform = meta.deform_i >= 0 || meta.deform_j >= 0;
  if (wants_injection + wants_lognormal + wants_deform > 1) {
    throw std::invalid_argument("make_scenario: at most one distortion may be active");
  }

  if (wants_injection) {
    auto [contaminated, pairs] = inject_outliers(sc.observed_d, m, mix_seed(meta.seed, 2));
    sc.observed_d = std::move(contaminated);
    sc.outliers = std::move(pairs);
    sc.meta.outlier_count = m;
  } else if (wants_lognormal) {
    sc.observed_d = lognormal_distort(sc.observed_d, meta.lognormal_sigma, mix_seed(meta.seed, 3));
  } else if (wants_deform) {
    sc.observed_d = deform_edge(sc.observed_d, meta.deform_i, meta.deform_j, meta.deform_log2);
    sc.outliers.emplace_back(std::min(meta.deform_i, meta.deform_j),
                             std::max(meta.deform_i, meta.deform_j));
    sc.meta.outlier_count = 1;
  } else {
    sc.meta.outlier_count = 0;
  }
  return sc;
}

}  // namespace tmds
