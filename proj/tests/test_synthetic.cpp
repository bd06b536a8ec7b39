#include "tmds/metric.hpp"
#include "tmds/rng.hpp"
#include "tmds/synthetic.hpp"
#include "tmds/triangle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

using namespace tmds;

TEST_CASE("sample_hypercube is uniform and deterministic") {
  const matrix_t pts = sample_hypercube(1000, 2, 3);
  CHECK(pts.minCoeff() >= 0.0);
  CHECK(pts.maxCoeff() < 1.0);
  for (index_t k = 0; k < 2; ++k) {
    CHECK(pts.col(k).mean() >= 0.47);
    CHECK(pts.col(k).mean() <= 0.53);
  }
  CHECK(pts == sample_hypercube(1000, 2, 3));
  CHECK(pts != sample_hypercube(1000, 2, 4));
}

TEST_CASE("inject_outliers changes exactly the recorded pairs") {
  const matrix_t d = pairwise_distances(sample_hypercube(30, 2, 7));

  const auto [same, empty] = inject_outliers(d, 0, 11);
  CHECK(same == d);
  CHECK(empty.empty());

  const auto [two, pairs] = inject_outliers(d, 2, 11);
  CHECK(pairs.size() == 2);
  index_t changed = 0;
  for (index_t i = 0; i < 30; ++i) {
    for (index_t j = i + 1; j < 30; ++j) {
      if (two(i, j) != d(i, j)) ++changed;
    }
  }
  CHECK(changed <= 2);  // coincidental value equality can only reduce the count
  for (const auto& [i, j] : pairs) {
    CHECK(i < j);
    CHECK(two(i, j) == two(j, i));
  }
  CHECK_NOTHROW(validate_distance_matrix(two));
  CHECK_THROWS_AS(inject_outliers(d, 436, 1), std::invalid_argument);
}

TEST_CASE("inject_outliers draws replacements from the distance distribution") {
  const matrix_t d = pairwise_distances(sample_hypercube(30, 2, 13));

  std::vector<double> population;
  for (index_t i = 0; i < 30; ++i) {
    for (index_t j = i + 1; j < 30; ++j) population.push_back(d(i, j));
  }
  std::sort(population.begin(), population.end());

  std::vector<double> samples;
  samples.reserve(10000);
  for (seed_t seed = 0; seed < 10000; ++seed) {
    const auto [out, pairs] = inject_outliers(d, 1, 100000 + seed);
    samples.push_back(out(pairs[0].first, pairs[0].second));
  }
  std::sort(samples.begin(), samples.end());

  // two-sample style KS distance between replacements and the population
  double ks = 0.0;
  std::size_t pi = 0;
  for (std::size_t si = 0; si < samples.size(); ++si) {
    while (pi < population.size() && population[pi] <= samples[si]) ++pi;
    const double fs = static_cast<double>(si + 1) / static_cast<double>(samples.size());
    const double fp = static_cast<double>(pi) / static_cast<double>(population.size());
    ks = std::max(ks, std::abs(fs - fp));
  }
  CHECK(ks < 0.05);
}

TEST_CASE("lognormal_distort calibration") {
  const matrix_t d = pairwise_distances(sample_hypercube(20, 2, 17));
  CHECK(lognormal_distort(d, 0.0, 5) == d);

  // factor law: exp(0.5 Z) has unit geometric mean and arithmetic mean e^{1/8}
  matrix_t big = matrix_t::Ones(1500, 1500);
  big.diagonal().setZero();
  const matrix_t distorted = lognormal_distort(big, 0.5, 23);
  double log_sum = 0.0, sum = 0.0;
  long long count = 0;
  for (index_t i = 0; i < 1500; ++i) {
    for (index_t j = i + 1; j < 1500; ++j) {
      log_sum += std::log(distorted(i, j));
      sum += distorted(i, j);
      ++count;
    }
  }
  const double mean_log = log_sum / static_cast<double>(count);
  const double mean = sum / static_cast<double>(count);
  CHECK(std::abs(mean_log) < 0.005);
  CHECK(std::abs(mean - std::exp(0.125)) < 0.01);

  const matrix_t again = lognormal_distort(d, 0.7, 29);
  CHECK(again.minCoeff() >= 0.0);  // factors strictly positive
  CHECK_NOTHROW(validate_distance_matrix(again));
}

TEST_CASE("shape_points plus lies on the two bars") {
  const matrix_t pts = shape_points(ShapeKind::plus, 200, 0.0, 31);
  for (index_t i = 0; i < 200; ++i) {
    CHECK((pts(i, 0) == 0.0 || pts(i, 1) == 0.0));
    CHECK(std::abs(pts(i, 0)) <= 1.0);
    CHECK(std::abs(pts(i, 1)) <= 1.0);
  }
  CHECK_THROWS_AS(shape_points(ShapeKind::plus, 3, 0.0, 1), std::invalid_argument);
}

TEST_CASE("shape_points spiral radius tracks the angle") {
  const matrix_t pts = shape_points(ShapeKind::spiral, 150, 0.0, 37);
  for (index_t i = 0; i < 150; ++i) {
    const double r = pts.row(i).norm();
    CHECK(r <= 1.0 + 1e-12);
    if (r > 1e-9) {
      const double theta = r * 6.0 * 3.14159265358979323846;  // radius grows linearly in angle
      CHECK(pts(i, 0) == doctest::Approx(r * std::cos(theta)).epsilon(1e-9));
      CHECK(pts(i, 1) == doctest::Approx(r * std::sin(theta)).epsilon(1e-9));
    }
  }
}

TEST_CASE("plus shape with zero jitter breaks nothing at the default tolerance") {
  // collinear triples sit exactly on the d1 + d2 == d3 boundary
  const matrix_t pts = shape_points(ShapeKind::plus, 40, 0.0, 41);
  const matrix_t d = pairwise_distances(pts);
  index_t broken = 0;
  for (index_t i = 0; i < 40; ++i) {
    for (index_t j = i + 1; j < 40; ++j) {
      for (index_t k = j + 1; k < 40; ++k) {
        if (is_broken(d(i, j), d(i, k), d(j, k))) ++broken;
      }
    }
  }
  CHECK(broken == 0);
}

TEST_CASE("deform_edge") {
  const matrix_t d = pairwise_distances(sample_hypercube(10, 2, 43));
  CHECK(deform_edge(d, 1, 2, 0.0) == d);
  const matrix_t stretched = deform_edge(d, 1, 2, 2.0);
  CHECK(stretched(1, 2) == doctest::Approx(4.0 * d(1, 2)));
  CHECK(stretched(2, 1) == stretched(1, 2));
  CHECK_THROWS_AS(deform_edge(d, 3, 3, 1.0), std::invalid_argument);
}

TEST_CASE("make_scenario stitches generators together") {
  ScenarioMeta meta;
  meta.kind = "hypercube";
  meta.n = 40;
  meta.dim = 2;
  meta.seed = 45;
  meta.outlier_rate = 0.10;
  const Scenario sc = make_scenario(meta);

  CHECK(sc.points.rows() == 40);
  CHECK((sc.true_d - pairwise_distances(sc.points, 2.0)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(sc.meta.outlier_count == 78);  // floor(0.10 * 780)
  CHECK(sc.outliers.size() == 78);

  std::set<edge_t> recorded(sc.outliers.begin(), sc.outliers.end());
  for (index_t i = 0; i < 40; ++i) {
    for (index_t j = i + 1; j < 40; ++j) {
      if (sc.observed_d(i, j) != sc.true_d(i, j)) CHECK(recorded.count({i, j}) == 1);
    }
  }

  // determinism and distortion exclusivity
  CHECK(make_scenario(meta).observed_d == sc.observed_d);
  meta.lognormal_sigma = 0.5;
  CHECK_THROWS_AS(make_scenario(meta), std::invalid_argument);
}
