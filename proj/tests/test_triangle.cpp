#include "tmds/metric.hpp"
#include "tmds/rng.hpp"
#include "tmds/synthetic.hpp"
#include "tmds/triangle.hpp"

#include <doctest.h>

#include <algorithm>
#include <stdexcept>

using namespace tmds;

namespace {

// Independent exhaustive oracle: enumerates unordered triples and applies
// the sorted-sides test directly.
int_matrix_t bruteforce_counts(const matrix_t& d, double rel_tol) {
  const index_t n = d.rows();
  int_matrix_t count = int_matrix_t::Zero(n, n);
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      for (index_t k = j + 1; k < n; ++k) {
        double s1 = d(i, j), s2 = d(i, k), s3 = d(j, k);
        if (s1 > s2) std::swap(s1, s2);
        if (s2 > s3) std::swap(s2, s3);
        if (s1 > s2) std::swap(s1, s2);
        if (s1 + s2 < s3 * (1.0 - rel_tol)) {
          ++count(i, j), ++count(j, i);
          ++count(i, k), ++count(k, i);
          ++count(j, k), ++count(k, j);
        }
      }
    }
  }
  return count;
}

matrix_t contaminated_matrix(index_t n, index_t m, seed_t seed) {
  const matrix_t d = pairwise_distances(sample_hypercube(n, 2, seed));
  return inject_outliers(d, m, mix_seed(seed, 99)).first;
}

}  // namespace

TEST_CASE("is_broken sorts and applies the strict test") {
  CHECK(is_broken(1, 1, 3));
  CHECK(is_broken(3, 1, 1));  // caller need not pre-sort
  CHECK_FALSE(is_broken(3, 4, 5));
  CHECK_FALSE(is_broken(1, 2, 3));  // exact equality is not a violation
  CHECK_THROWS_AS(is_broken(-1, 2, 3), std::invalid_argument);
}

TEST_CASE("count_broken_exact on metric and hand-built inputs") {
  const matrix_t clean = pairwise_distances(sample_hypercube(15, 2, 5));
  const TriangleCounts tc = count_broken_exact(clean);
  CHECK(tc.count.maxCoeff() == 0);
  CHECK(tc.tested(0, 1) == 13);
  CHECK(tc.tested(3, 3) == 0);

  matrix_t one_triangle(3, 3);
  one_triangle << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  const TriangleCounts broken = count_broken_exact(one_triangle);
  CHECK(broken.count(0, 1) == 1);
  CHECK(broken.count(0, 2) == 1);
  CHECK(broken.count(1, 2) == 1);

  matrix_t tiny(2, 2);
  tiny << 0, 1, 1, 0;
  CHECK_THROWS_AS(count_broken_exact(tiny), std::invalid_argument);
}

TEST_CASE("count_broken_exact equals the brute-force triple loop") {
  const matrix_t d = contaminated_matrix(20, 5, 123);
  const TriangleCounts tc = count_broken_exact(d);
  CHECK(tc.count == bruteforce_counts(d, kDefaultBreakTol));
}

TEST_CASE("count_broken_sampled with full sampling equals exact per-edge counts") {
  for (seed_t seed = 0; seed < 4; ++seed) {
    const index_t n = 10 + static_cast<index_t>(seed) * 5;
    const matrix_t d = contaminated_matrix(n, n / 2, 1000 + seed);
    const TriangleCounts exact = count_broken_exact(d);
    const TriangleCounts sampled = count_broken_sampled(d, static_cast<int>(n), 7 * seed + 1);
    CHECK(sampled.count == exact.count);
    CHECK(sampled.tested(0, 1) == static_cast<int>(n - 2));
  }
}

TEST_CASE("count_broken_sampled is deterministic and clean on metric data") {
  const matrix_t clean = pairwise_distances(sample_hypercube(25, 3, 9));
  const TriangleCounts a = count_broken_sampled(clean, 10, 42);
  const TriangleCounts b = count_broken_sampled(clean, 10, 42);
  CHECK(a.count == b.count);
  CHECK(a.count.maxCoeff() == 0);
  CHECK(a.tested(0, 1) == 10);

  const matrix_t dirty = contaminated_matrix(25, 30, 77);
  const TriangleCounts c = count_broken_sampled(dirty, 10, 42);
  const TriangleCounts e = count_broken_sampled(dirty, 10, 43);
  CHECK(c.count == count_broken_sampled(dirty, 10, 42).count);
  CHECK(c.count != e.count);  // different seed, different sample
}

TEST_CASE("build_histogram") {
  const matrix_t clean = pairwise_distances(sample_hypercube(10, 2, 3));
  const BreakHistogram h = build_histogram(count_broken_exact(clean));
  CHECK(h.edge_total == 45);
  CHECK(h.bins.size() == 1);
  CHECK(h.bins.at(0) == 45);

  matrix_t one_triangle(3, 3);
  one_triangle << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  const BreakHistogram hb = build_histogram(count_broken_exact(one_triangle));
  CHECK(hb.bins.at(1) == 3);

  const matrix_t dirty = contaminated_matrix(18, 12, 55);
  const BreakHistogram hd = build_histogram(count_broken_exact(dirty));
  long long mass = 0;
  for (const auto& [b, c] : hd.bins) mass += c;
  CHECK(mass == hd.edge_total);
}

TEST_CASE("select_threshold follows both histogram requirements") {
  BreakHistogram clean;
  clean.edge_total = 45;
  clean.bins[0] = 45;
  const ThresholdPick fallback = select_threshold(clean);
  CHECK(fallback.fallback);
  CHECK(fallback.phi == 0);

  BreakHistogram crafted;
  crafted.edge_total = 105;
  crafted.bins[0] = 80;
  crafted.bins[1] = 15;
  crafted.bins[2] = 1;
  crafted.bins[4] = 9;  // bin 3 absent; gaps read as zero
  const ThresholdPick pick = select_threshold(crafted);
  CHECK_FALSE(pick.fallback);
  CHECK(pick.phi == 3);
}

TEST_CASE("select_threshold never flags more than half the edges") {
  for (seed_t seed = 0; seed < 8; ++seed) {
    const matrix_t d = contaminated_matrix(24, 3 + static_cast<index_t>(seed) * 10, 300 + seed);
    const BreakHistogram h = build_histogram(count_broken_exact(d));
    const ThresholdPick pick = select_threshold(h);
    if (pick.fallback) continue;
    long long flagged = 0;
    for (const auto& [b, c] : h.bins) {
      if (b > pick.phi) flagged += c;
    }
    CHECK(2 * flagged <= h.edge_total);
  }
}

TEST_CASE("filter_mask") {
  matrix_t one_triangle(3, 3);
  one_triangle << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  const TriangleCounts tc = count_broken_exact(one_triangle);

  const bool_matrix_t all = filter_mask(tc, tc.count.maxCoeff());
  CHECK(all.all());

  const bool_matrix_t none = filter_mask(tc, 0);
  CHECK(none(0, 0));
  CHECK_FALSE(none(0, 1));
  CHECK_FALSE(none(0, 2));
  CHECK_FALSE(none(1, 2));

  // flagged set identity: |flagged| == sum of bins above phi
  const matrix_t dirty = contaminated_matrix(22, 20, 17);
  const TriangleCounts tcd = count_broken_exact(dirty);
  const BreakHistogram h = build_histogram(tcd);
  for (int phi = 0; phi < 6; ++phi) {
    long long expected = 0;
    for (const auto& [b, c] : h.bins) {
      if (b > phi) expected += c;
    }
    CHECK(static_cast<long long>(flagged_edges(tcd, phi).size()) == expected);
  }
}

TEST_CASE("tmds_filter keeps clean data intact") {
  const matrix_t clean = pairwise_distances(sample_hypercube(20, 2, 71));
  const FilterResult result = tmds_filter(clean, FilterMode::Exact());
  CHECK(result.fallback);
  CHECK(result.keep.all());
  CHECK(flagged_edges(result.counts, result.phi).empty());
}

TEST_CASE("tmds_filter flags a single strongly distorted edge") {
  const matrix_t clean = pairwise_distances(sample_hypercube(30, 2, 81));
  const matrix_t distorted = deform_edge(clean, 4, 17, 2.0);  // factor 4
  const FilterResult result = tmds_filter(distorted, FilterMode::Exact());
  CHECK_FALSE(result.fallback);
  CHECK_FALSE(result.keep(4, 17));
}

TEST_CASE("broken count of a distorted edge is non-decreasing in the factor") {
  const matrix_t clean = pairwise_distances(sample_hypercube(40, 2, 91));
  int previous = -1;
  for (const double log2f : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    const matrix_t d = deform_edge(clean, 3, 21, log2f);
    const int count = count_broken_exact(d).count(3, 21);
    CHECK(count >= previous);
    previous = count;
  }
  CHECK(previous > 0);
}

TEST_CASE("tmds_filter flag volume at 10% contamination stays near the injected count") {
  const index_t m = 241;  // 10% of the 2415 edges at N=70
  long long total_flagged = 0;
  for (seed_t seed = 0; seed < 10; ++seed) {
    const matrix_t d = contaminated_matrix(70, m, 4000 + seed);
    const FilterResult result = tmds_filter(d, FilterMode::Exact());
    const auto flagged = static_cast<long long>(flagged_edges(result.counts, result.phi).size());
    CHECK(flagged >= m / 4);
    CHECK(flagged <= 2 * m);
    total_flagged += flagged;
  }
  const double mean = static_cast<double>(total_flagged) / 10.0;
  CHECK(mean >= 0.5 * static_cast<double>(m));
  CHECK(mean <= 1.5 * static_cast<double>(m));
}

TEST_CASE("default_triangles_per_edge rule of thumb") {
  CHECK(default_triangles_per_edge(100) == 45);
  CHECK(default_triangles_per_edge(30) == 28);          // capped at N-2
  CHECK(default_triangles_per_edge(200, 9000) == 90);   // 2 * 9000 / 200
  CHECK(default_triangles_per_edge(200, 100) == 45);    // floor at 45
}
