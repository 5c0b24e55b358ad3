#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "edlab/field.hpp"

namespace edlab {

// Snapshot files come in pairs: <stem>.csv holds one row per grid point
// (index, coordinates, value columns) and <stem>.json the grid header.
nlohmann::json grid_header(const Grid& grid);
Grid grid_from_header(const nlohmann::json& header);

struct Snapshot {
  Grid grid;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // one vector per value column
  nlohmann::json header;
};

void write_scalar_snapshot(const std::filesystem::path& stem, const ScalarField& f,
                           const std::string& column, const nlohmann::json& extra = {});
void write_complex_snapshot(const std::filesystem::path& stem, const ComplexField& psi,
                            const nlohmann::json& extra = {});
void write_vector_snapshot(const std::filesystem::path& stem, const VectorField& v,
                           const std::string& column, const nlohmann::json& extra = {});

// Accepts either the .csv or .json path, or the bare stem.
Snapshot read_snapshot(const std::filesystem::path& path);

// First value column of a snapshot as a scalar field.
ScalarField snapshot_scalar(const Snapshot& snapshot);

}  // namespace edlab
