#pragma once

#include "tmds/synthetic.hpp"
#include "tmds/triangle.hpp"
#include "tmds/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

// On-disk formats.
//
// Matrix CSV: one row per line, comma separated, no header, full decimal
// precision (values round-trip bit-exactly). Mask CSV uses 0/1. A
// scenario bundle is a directory holding points.csv, true_d.csv,
// observed_d.csv, outliers.json and meta.json.

namespace tmds {

void save_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const matrix_t>& m);
matrix_t load_matrix_csv(const std::filesystem::path& path);

void save_mask_csv(const std::filesystem::path& path, const bool_matrix_t& keep);
bool_matrix_t load_mask_csv(const std::filesystem::path& path);

/// Loads a distance matrix, checking symmetry within sym_rel_tol
/// (relative to the larger entry), then symmetrizes by averaging, forces
/// an exact zero diagonal and validates the result.
matrix_t load_distance_csv(const std::filesystem::path& path, scalar_t sym_rel_tol = 1e-9);

void save_scenario(const std::filesystem::path& dir, const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& dir);

nlohmann::json scenario_meta_json(const ScenarioMeta& meta);
ScenarioMeta scenario_meta_from_json(const nlohmann::json& j);

/// Histogram bins, phi, fallback flag and the flagged (i, j, count) list.
nlohmann::json filter_diagnostics_json(const FilterResult& result);

void save_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace tmds
