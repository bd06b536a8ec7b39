#include "tmds/io.hpp"
#include "tmds/metric.hpp"
#include "tmds/rng.hpp"
#include "tmds/synthetic.hpp"
#include "tmds/triangle.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>

using namespace tmds;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tmds_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("matrix CSV round-trips bit-exactly") {
  TempDir tmp;
  rng_t gen(3);
  matrix_t m(7, 4);
  for (index_t i = 0; i < 7; ++i) {
    for (index_t j = 0; j < 4; ++j) {
      m(i, j) = (unit_uniform(gen) - 0.5) * std::pow(10.0, static_cast<double>(gen() % 7) - 3.0);
    }
  }
  m(0, 0) = 0.1;  // not exactly representable
  m(1, 1) = 1e-300;

  const fs::path file = tmp.path / "m.csv";
  save_matrix_csv(file, m);
  CHECK(load_matrix_csv(file) == m);
}

TEST_CASE("distance CSV loader validates and symmetrizes") {
  TempDir tmp;
  const matrix_t d = pairwise_distances(sample_hypercube(8, 2, 5));
  const fs::path file = tmp.path / "d.csv";

  matrix_t wobble = d;
  wobble(0, 1) = d(0, 1) * (1.0 + 2e-10);  // inside the 1e-9 relative band
  save_matrix_csv(file, wobble);
  const matrix_t loaded = load_distance_csv(file);
  CHECK_NOTHROW(validate_distance_matrix(loaded));
  CHECK(loaded(0, 1) == doctest::Approx(0.5 * (wobble(0, 1) + wobble(1, 0))).epsilon(1e-15));

  matrix_t bad = d;
  bad(2, 3) = d(2, 3) * 1.01;
  save_matrix_csv(file, bad);
  CHECK_THROWS_AS(load_distance_csv(file), std::runtime_error);

  save_matrix_csv(file, matrix_t::Ones(3, 4));
  CHECK_THROWS_AS(load_distance_csv(file), std::runtime_error);
}

TEST_CASE("malformed CSV is rejected") {
  TempDir tmp;
  const fs::path file = tmp.path / "bad.csv";
  {
    std::ofstream out(file);
    out << "1,2,3\n4,notanumber,6\n";
  }
  CHECK_THROWS_AS(load_matrix_csv(file), std::runtime_error);
  {
    std::ofstream out(file);
    out << "1,2,3\n4,5\n";
  }
  CHECK_THROWS_AS(load_matrix_csv(file), std::runtime_error);
  CHECK_THROWS_AS(load_matrix_csv(tmp.path / "missing.csv"), std::runtime_error);
}

TEST_CASE("mask CSV round-trips") {
  TempDir tmp;
  const matrix_t d = deform_edge(pairwise_distances(sample_hypercube(12, 2, 7)), 2, 9, 2.0);
  const FilterResult filter = tmds_filter(d, FilterMode::Exact());
  const fs::path file = tmp.path / "mask.csv";
  save_mask_csv(file, filter.keep);
  CHECK(load_mask_csv(file) == filter.keep);

  {
    std::ofstream out(file);
    out << "1,0\n0,2\n";
  }
  CHECK_THROWS_AS(load_mask_csv(file), std::runtime_error);
}

TEST_CASE("scenario bundles round-trip") {
  TempDir tmp;
  ScenarioMeta meta;
  meta.kind = "hypercube";
  meta.n = 25;
  meta.dim = 3;
  meta.seed = 99;
  meta.outlier_rate = 0.08;
  const Scenario sc = make_scenario(meta);

  const fs::path dir = tmp.path / "bundle";
  save_scenario(dir, sc);
  CHECK(fs::exists(dir / "points.csv"));
  CHECK(fs::exists(dir / "true_d.csv"));
  CHECK(fs::exists(dir / "observed_d.csv"));
  CHECK(fs::exists(dir / "outliers.json"));
  CHECK(fs::exists(dir / "meta.json"));

  const Scenario back = load_scenario(dir);
  CHECK(back.points == sc.points);
  CHECK(back.true_d == sc.true_d);
  CHECK(back.observed_d == sc.observed_d);
  CHECK(back.outliers == sc.outliers);
  CHECK(back.meta.kind == sc.meta.kind);
  CHECK(back.meta.seed == sc.meta.seed);
  CHECK(back.meta.outlier_count == sc.meta.outlier_count);
}

TEST_CASE("filter diagnostics JSON carries the histogram and flags") {
  const matrix_t d = deform_edge(pairwise_distances(sample_hypercube(15, 2, 11)), 1, 8, 2.0);
  const FilterResult filter = tmds_filter(d, FilterMode::Exact());
  const nlohmann::json j = filter_diagnostics_json(filter);
  CHECK(j.at("n") == 15);
  CHECK(j.at("edge_total") == 105);
  CHECK(j.at("phi") == filter.phi);
  CHECK(j.at("fallback") == filter.fallback);
  long long mass = 0;
  for (const auto& [key, value] : j.at("histogram").items()) mass += value.get<long long>();
  CHECK(mass == 105);
  CHECK(j.at("flagged_count").get<std::size_t>() == j.at("flagged").size());
}
