#include "tmds/solvers.hpp"

#include "tmds/metric.hpp"
#include "tmds/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace tmds {

namespace {

matrix_t embedded_distances(const Eigen::Ref<const matrix_t>& x) {
  const index_t n = x.rows();
  matrix_t d = matrix_t::Zero(n, n);
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = (x.row(i) - x.row(j)).norm();
    }
  }
  return d;
}

scalar_t stress_of(const Eigen::Ref<const matrix_t>& distances,
                   const Eigen::Ref<const matrix_t>& weights,
                   const Eigen::Ref<const matrix_t>& x) {
  scalar_t s = 0.0;
  const index_t n = distances.rows();
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const scalar_t r = distances(i, j) - (x.row(i) - x.row(j)).norm();
      s += weights(i, j) * r * r;
    }
  }
  return s;
}

struct UnionFind {
  std::vector<index_t> parent;
  explicit UnionFind(index_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  index_t find(index_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(index_t a, index_t b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

bool positive_weight_graph_connected(const Eigen::Ref<const matrix_t>& weights) {
  const index_t n = weights.rows();
  if (n <= 1) return true;
  UnionFind uf(n);
  index_t components = n;
  for (index_t i = 0; i < n && components > 1; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      if (weights(i, j) > 0.0 && uf.unite(i, j)) --components;
    }
  }
  return components == 1;
}

int connectivity_threshold(const TriangleCounts& counts) {
  const index_t n = counts.n;
  if (n <= 1) return 0;
  std::vector<std::tuple<int, index_t, index_t>> edges;
  edges.reserve(static_cast<std::size_t>(edge_count(n)));
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      edges.emplace_back(counts.count(i, j), i, j);
    }
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
  UnionFind uf(n);
  index_t components = n;
  for (const auto& [c, i, j] : edges) {
    if (uf.unite(i, j) && --components == 1) return c;
  }
  return edges.empty() ? 0 : std::get<0>(edges.back());
}

matrix_t mask_to_weights(const bool_matrix_t& keep) {
  matrix_t w = keep.cast<scalar_t>();
  w.diagonal().setZero();
  return w;
}

ClassicalInitResult classical_init(const Eigen::Ref<const matrix_t>& distances, index_t dim) {
  const index_t n = distances.rows();
  if (dim < 1) throw std::invalid_argument("classical_init: dim must be >= 1");
  if (dim >= n) throw std::invalid_argument("classical_init: dim must be < N");

  // Double-centered squared distances.
  const matrix_t d2 = distances.array().square();
  const matrix_t j = matrix_t::Identity(n, n) - matrix_t::Constant(n, n, 1.0 / n);
  const matrix_t b = -0.5 * j * d2 * j;

  Eigen::SelfAdjointEigenSolver<matrix_t> es(b);
  if (es.info() != Eigen::Success) throw std::runtime_error("classical_init: eigensolver failed");

  ClassicalInitResult result;
  result.coords = matrix_t::Zero(n, dim);
  const scalar_t top = es.eigenvalues()(n - 1);
  const scalar_t floor = std::max(top, 0.0) * 1e-12;
  for (index_t k = 0; k < dim; ++k) {
    const index_t src = n - 1 - k;  // eigenvalues come out ascending
    const scalar_t lambda = es.eigenvalues()(src);
    if (lambda > floor) {
      result.coords.col(k) = es.eigenvectors().col(src) * std::sqrt(lambda);
      ++result.positive_directions;
    }
  }
  result.padded = result.positive_directions < dim;
  return result;
}

matrix_t initial_embedding(const Eigen::Ref<const matrix_t>& distances, index_t dim,
                           const SolverConfig& config) {
  const index_t n = distances.rows();
  switch (config.init.kind) {
    case InitSpec::Kind::classical:
      return classical_init(distances, dim).coords;
    case InitSpec::Kind::random: {
      rng_t gen(config.seed);
      matrix_t x(n, dim);
      for (index_t i = 0; i < n; ++i) {
        for (index_t k = 0; k < dim; ++k) x(i, k) = unit_uniform(gen);
      }
      return x;
    }
    case InitSpec::Kind::given:
      if (config.init.coords.rows() != n || config.init.coords.cols() != dim) {
        throw std::invalid_argument("initial_embedding: given coordinates have wrong shape");
      }
      return config.init.coords;
  }
  throw std::logic_error("initial_embedding: unknown init kind");
}

SmacofResult smacof(const Eigen::Ref<const matrix_t>& distances,
                    const Eigen::Ref<const matrix_t>& weights, index_t dim,
                    const SolverConfig& config) {
  const index_t n = distances.rows();
  if (distances.cols() != n || weights.rows() != n || weights.cols() != n) {
    throw std::invalid_argument("smacof: dimension mismatch");
  }
  if (dim < 1) throw std::invalid_argument("smacof: dim must be >= 1");
  if (dim >= n) throw std::invalid_argument("smacof: dim must be < N");
  if (config.max_iters < 1 || !(config.rel_stress_tol > 0.0)) {
    throw std::invalid_argument("smacof: bad solver config");
  }

  matrix_t w = weights;
  w.diagonal().setZero();
  if (!positive_weight_graph_connected(w)) {
    throw std::runtime_error("smacof: positive-weight graph is disconnected (over-filtered?)");
  }

  // Weighted Laplacian V with the translation mode pinned:
  // (V + 11^T/n)^-1 agrees with the pseudo-inverse of V on the range of
  // the B-matrix, so one LDLT factorization serves every iteration.
  matrix_t v = -w;
  v.diagonal() = w.rowwise().sum();
  v += matrix_t::Constant(n, n, 1.0 / n);
  const Eigen::LDLT<matrix_t> solver(v);
  if (solver.info() != Eigen::Success) throw std::runtime_error("smacof: factorization failed");

  SmacofResult result;
  result.embedding = initial_embedding(distances, dim, config);

  scalar_t stress = stress_of(distances, w, result.embedding);
  result.stress_trace.push_back(stress);

  matrix_t bmat(n, n);
  for (int iter = 0; iter < config.max_iters; ++iter) {
    if (stress <= 0.0) break;  // exact fit; the transform is a fixed point

    const matrix_t dist = embedded_distances(result.embedding);
    for (index_t i = 0; i < n; ++i) {
      scalar_t row_sum = 0.0;
      for (index_t j = 0; j < n; ++j) {
        scalar_t b = 0.0;
        if (i != j && dist(i, j) > 0.0) b = -w(i, j) * distances(i, j) / dist(i, j);
        bmat(i, j) = b;
        row_sum += b;
      }
      bmat(i, i) = -row_sum;
    }

    const matrix_t next = solver.solve(bmat * result.embedding);
    const scalar_t next_stress = stress_of(distances, w, next);
    if (next_stress >= stress) break;  // numerical fixed point

    result.embedding = next;
    result.stress_trace.push_back(next_stress);
    ++result.iterations;
    const scalar_t rel = (stress - next_stress) / stress;
    stress = next_stress;
    if (rel < config.rel_stress_tol) break;
  }
  return result;
}

TmdsEmbedResult tmds_embed(const Eigen::Ref<const matrix_t>& distances, index_t dim,
                           const FilterMode& mode, const SolverConfig& config,
                           scalar_t rel_tol) {
  FilterResult filter = tmds_filter(distances, mode, rel_tol);

  TmdsEmbedResult result;
  result.phi_selected = filter.phi;
  result.fallback = filter.fallback;
  result.phi_used = filter.phi;
  result.keep = std::move(filter.keep);

  matrix_t w = mask_to_weights(result.keep);
  if (!positive_weight_graph_connected(w)) {
    const int reconnect = connectivity_threshold(filter.counts);
    result.phi_used = std::max(result.phi_used, reconnect);
    result.reconnected = true;
    result.keep = filter_mask(filter.counts, result.phi_used);
    w = mask_to_weights(result.keep);
  }

  SmacofResult solved = smacof(distances, w, dim, config);
  result.embedding = std::move(solved.embedding);
  result.stress_trace = std::move(solved.stress_trace);
  result.counts = std::move(filter.counts);
  result.histogram = std::move(filter.histogram);
  return result;
}

SmacofResult sammon_embed(const Eigen::Ref<const matrix_t>& distances, index_t dim,
                          const SolverConfig& config, scalar_t epsilon) {
  return smacof(distances, sammon_weights(distances, epsilon), dim, config);
}

Fg12Result fg12_embed(const Eigen::Ref<const matrix_t>& distances, index_t dim, scalar_t lambda,
                      const SolverConfig& config) {
  if (!(lambda > 0.0)) throw std::invalid_argument("fg12_embed: lambda must be > 0");
  const index_t n = distances.rows();

  Fg12Result result;
  result.embedding = initial_embedding(distances, dim, config);
  result.outlier_offsets = matrix_t::Zero(n, n);
  const matrix_t w = uniform_weights(n);

  SolverConfig inner = config;
  scalar_t objective = -1.0;
  for (int outer = 0; outer < config.max_iters; ++outer) {
    // X-step: majorize the stress with the current offsets removed.
    matrix_t target = distances - result.outlier_offsets;
    inner.init = InitSpec::Given(result.embedding);
    result.embedding = smacof(target, w, dim, inner).embedding;

    // O-step: exact minimizer of the separable l0-penalized subproblem.
    // Residual r absorbs into O (cost lambda) iff that beats cost r^2.
    const matrix_t dist = embedded_distances(result.embedding);
    const matrix_t residual = distances - dist;
    matrix_t offsets = (residual.array().square() > lambda).select(residual, matrix_t::Zero(n, n));
    offsets.diagonal().setZero();
    const bool offsets_fixed = offsets == result.outlier_offsets;
    result.outlier_offsets = std::move(offsets);

    scalar_t fit = 0.0;
    long long nonzero = 0;
    for (index_t i = 0; i < n; ++i) {
      for (index_t j = i + 1; j < n; ++j) {
        const scalar_t r = residual(i, j) - result.outlier_offsets(i, j);
        fit += r * r;
        if (result.outlier_offsets(i, j) != 0.0) ++nonzero;
      }
    }
    result.nonzero_count = nonzero;
    const scalar_t next = fit + lambda * static_cast<scalar_t>(nonzero);
    result.objective_trace.push_back(next);

    // Fixed point of the alternation: X solves the current subproblem and
    // the offsets did not move, so another round cannot improve.
    if (offsets_fixed) break;
    if (objective >= 0.0 &&
        (objective <= 0.0 || (objective - next) / objective < config.rel_stress_tol)) {
      break;
    }
    objective = next;
  }
  return result;
}

}  // namespace tmds
