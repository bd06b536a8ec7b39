#include "tmds/io.hpp"

#include "tmds/metric.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tmds {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

std::vector<std::vector<scalar_t>> read_rows(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<scalar_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream fields(line);
    std::vector<scalar_t> row;
    scalar_t value;
    while (fields >> value) row.push_back(value);
    if (!fields.eof()) throw std::runtime_error("malformed CSV row in " + path.string());
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV file " + path.string());
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) {
      throw std::runtime_error("ragged CSV rows in " + path.string());
    }
  }
  return rows;
}

}  // namespace

void save_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const matrix_t>& m) {
  std::ofstream out = open_out(path);
  out << std::setprecision(std::numeric_limits<scalar_t>::max_digits10);
  for (index_t i = 0; i < m.rows(); ++i) {
    for (index_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

matrix_t load_matrix_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  matrix_t m(static_cast<index_t>(rows.size()), static_cast<index_t>(rows.front().size()));
  for (index_t i = 0; i < m.rows(); ++i) {
    for (index_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void save_mask_csv(const std::filesystem::path& path, const bool_matrix_t& keep) {
  std::ofstream out = open_out(path);
  for (index_t i = 0; i < keep.rows(); ++i) {
    for (index_t j = 0; j < keep.cols(); ++j) {
      if (j) out << ',';
      out << (keep(i, j) ? 1 : 0);
    }
    out << '\n';
  }
}

bool_matrix_t load_mask_csv(const std::filesystem::path& path) {
  const matrix_t raw = load_matrix_csv(path);
  bool_matrix_t keep(raw.rows(), raw.cols());
  for (index_t i = 0; i < raw.rows(); ++i) {
    for (index_t j = 0; j < raw.cols(); ++j) {
      if (raw(i, j) != 0.0 && raw(i, j) != 1.0) {
        throw std::runtime_error("mask CSV must contain only 0/1: " + path.string());
      }
      keep(i, j) = raw(i, j) != 0.0;
    }
  }
  return keep;
}

matrix_t load_distance_csv(const std::filesystem::path& path, scalar_t sym_rel_tol) {
  matrix_t d = load_matrix_csv(path);
  const index_t n = d.rows();
  if (d.cols() != n) throw std::runtime_error("distance CSV is not square: " + path.string());
  if (!d.allFinite()) throw std::runtime_error("distance CSV has non-finite entries");
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const scalar_t a = d(i, j), b = d(j, i);
      if (std::abs(a - b) > sym_rel_tol * std::max(std::abs(a), std::abs(b))) {
        throw std::runtime_error("distance CSV asymmetric beyond tolerance");
      }
      d(i, j) = d(j, i) = 0.5 * (a + b);
    }
    d(i, i) = 0.0;
  }
  validate_distance_matrix(d);
  return d;
}

nlohmann::json scenario_meta_json(const ScenarioMeta& meta) {
  return {{"kind", meta.kind},
          {"n", meta.n},
          {"dim", meta.dim},
          {"scale", meta.scale},
          {"jitter", meta.jitter},
          {"seed", meta.seed},
          {"outlier_rate", meta.outlier_rate},
          {"outlier_count", meta.outlier_count},
          {"lognormal_sigma", meta.lognormal_sigma},
          {"deform_i", meta.deform_i},
          {"deform_j", meta.deform_j},
          {"deform_log2", meta.deform_log2}};
}

ScenarioMeta scenario_meta_from_json(const nlohmann::json& j) {
  ScenarioMeta meta;
  meta.kind = j.at("kind").get<std::string>();
  meta.n = j.at("n").get<index_t>();
  meta.dim = j.at("dim").get<index_t>();
  meta.scale = j.at("scale").get<scalar_t>();
  meta.jitter = j.at("jitter").get<scalar_t>();
  meta.seed = j.at("seed").get<seed_t>();
  meta.outlier_rate = j.at("outlier_rate").get<scalar_t>();
  meta.outlier_count = j.at("outlier_count").get<index_t>();
  meta.lognormal_sigma = j.at("lognormal_sigma").get<scalar_t>();
  meta.deform_i = j.at("deform_i").get<index_t>();
  meta.deform_j = j.at("deform_j").get<index_t>();
  meta.deform_log2 = j.at("deform_log2").get<scalar_t>();
  return meta;
}

void save_scenario(const std::filesystem::path& dir, const Scenario& scenario) {
  std::filesystem::create_directories(dir);
  save_matrix_csv(dir / "points.csv", scenario.points);
  save_matrix_csv(dir / "true_d.csv", scenario.true_d);
  save_matrix_csv(dir / "observed_d.csv", scenario.observed_d);

  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [i, j] : scenario.outliers) pairs.push_back({i, j});
  save_json(dir / "outliers.json", {{"pairs", pairs}});
  save_json(dir / "meta.json", scenario_meta_json(scenario.meta));
}

Scenario load_scenario(const std::filesystem::path& dir) {
  Scenario sc;
  sc.points = load_matrix_csv(dir / "points.csv");
  sc.true_d = load_distance_csv(dir / "true_d.csv");
  sc.observed_d = load_distance_csv(dir / "observed_d.csv");
  sc.meta = scenario_meta_from_json(load_json(dir / "meta.json"));
  const nlohmann::json outliers = load_json(dir / "outliers.json");
  for (const auto& pair : outliers.at("pairs")) {
    sc.outliers.emplace_back(pair.at(0).get<index_t>(), pair.at(1).get<index_t>());
  }
  return sc;
}

nlohmann::json filter_diagnostics_json(const FilterResult& result) {
  nlohmann::json histogram = nlohmann::json::object();
  for (const auto& [b, count] : result.histogram.bins) histogram[std::to_string(b)] = count;

  nlohmann::json flagged = nlohmann::json::array();
  for (const auto& [i, j, c] : flagged_edges(result.counts, result.phi)) {
    flagged.push_back({i, j, c});
  }
  return {{"n", result.counts.n},
          {"edge_total", result.histogram.edge_total},
          {"phi", result.phi},
          {"fallback", result.fallback},
          {"histogram", histogram},
          {"flagged", flagged},
          {"flagged_count", flagged.size()}};
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace tmds
