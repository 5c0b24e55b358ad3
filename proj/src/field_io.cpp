#include "edlab/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "edlab/error.hpp"

namespace edlab {
namespace {

namespace fs = std::filesystem;

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

fs::path with_ext(fs::path stem, const char* ext) {
  if (stem.extension() == ".csv" || stem.extension() == ".json") stem.replace_extension();
  stem += ext;
  return stem;
}

const char* axis_name(std::size_t a) { return a == 0 ? "x" : "y"; }

void write_files(const fs::path& stem, const Grid& grid, const std::vector<std::string>& columns,
                 const std::vector<std::span<const double>>& data, const nlohmann::json& extra) {
  nlohmann::json header = grid_header(grid);
  header["columns"] = columns;
  if (extra.is_object()) {
    for (auto it = extra.begin(); it != extra.end(); ++it) header[it.key()] = it.value();
  }
  {
    std::ofstream js(with_ext(stem, ".json"));
    if (!js) fail(ErrorCode::io, "cannot write " + with_ext(stem, ".json").string());
    js << header.dump(2) << '\n';
  }
  std::ofstream csv(with_ext(stem, ".csv"));
  if (!csv) fail(ErrorCode::io, "cannot write " + with_ext(stem, ".csv").string());
  csv << "index";
  for (std::size_t a = 0; a < grid.dims(); ++a) csv << ',' << axis_name(a);
  for (const auto& c : columns) csv << ',' << c;
  csv << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << i;
    const Point x = grid.position(i);
    for (std::size_t a = 0; a < grid.dims(); ++a) csv << ',' << fmt_double(x[a]);
    for (const auto& col : data) csv << ',' << fmt_double(col[i]);
    csv << '\n';
  }
}

}  // namespace

nlohmann::json grid_header(const Grid& grid) {
  nlohmann::json h;
  h["format"] = "edlab-field";
  h["version"] = 1;
  h["topology"] = std::string(to_string(grid.topology()));
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    h["points"].push_back(grid.points(a));
    h["spacing"].push_back(grid.spacing(a));
    h["extent"].push_back(grid.extent(a));
    h["origin"].push_back(grid.origin(a));
    h["periodic"].push_back(grid.periodic(a));
  }
  return h;
}

Grid grid_from_header(const nlohmann::json& header) {
  try {
    return Grid(topology_from_string(header.at("topology").get<std::string>()),
                header.at("points").get<std::vector<std::size_t>>(),
                header.at("extent").get<std::vector<double>>(),
                header.at("origin").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, std::string("malformed field header: ") + e.what());
  }
}

void write_scalar_snapshot(const fs::path& stem, const ScalarField& f, const std::string& column,
                           const nlohmann::json& extra) {
  write_files(stem, f.grid(), {column}, {f.values()}, extra);
}

void write_complex_snapshot(const fs::path& stem, const ComplexField& psi,
                            const nlohmann::json& extra) {
  std::vector<double> re(psi.size()), im(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    re[i] = psi[i].real();
    im[i] = psi[i].imag();
  }
  write_files(stem, psi.grid(), {"re", "im"}, {re, im}, extra);
}

void write_vector_snapshot(const fs::path& stem, const VectorField& v, const std::string& column,
                           const nlohmann::json& extra) {
  std::vector<std::string> cols;
  std::vector<std::span<const double>> data;
  for (std::size_t a = 0; a < v.dims(); ++a) {
    cols.push_back(column + "_" + axis_name(a));
    data.push_back(v.component(a));
  }
  write_files(stem, v.grid(), cols, data, extra);
}

Snapshot read_snapshot(const fs::path& path) {
  const fs::path json_path = with_ext(path, ".json");
  const fs::path csv_path = with_ext(path, ".csv");
  std::ifstream js(json_path);
  if (!js) fail(ErrorCode::io, "cannot read " + json_path.string());
  nlohmann::json header;
  try {
    js >> header;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, json_path.string() + ": " + e.what());
  }
  Grid grid = grid_from_header(header);
  Snapshot snap{grid, header.value("columns", std::vector<std::string>{}), {}, header};
  if (snap.columns.empty()) fail(ErrorCode::io, json_path.string() + ": no value columns");

  std::ifstream csv(csv_path);
  if (!csv) fail(ErrorCode::io, "cannot read " + csv_path.string());
  std::string line;
  std::getline(csv, line);
  const std::size_t skip = 1 + grid.dims();
  snap.data.assign(snap.columns.size(), std::vector<double>(grid.size(), 0.0));
  std::size_t row = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    if (row >= grid.size()) fail(ErrorCode::io, csv_path.string() + ": too many rows");
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= skip && col - skip < snap.columns.size()) {
        try {
          snap.data[col - skip][row] = std::stod(cell);
        } catch (const std::exception&) {
          fail(ErrorCode::io, csv_path.string() + ": bad number on row " + std::to_string(row + 2));
        }
      }
      ++col;
    }
    if (col != skip + snap.columns.size()) {
      fail(ErrorCode::io, csv_path.string() + ": wrong column count on row " + std::to_string(row + 2));
    }
    ++row;
  }
  if (row != grid.size()) fail(ErrorCode::io, csv_path.string() + ": expected " +
                                                  std::to_string(grid.size()) + " rows");
  return snap;
}

ScalarField snapshot_scalar(const Snapshot& snapshot) {
  return ScalarField(snapshot.grid, snapshot.data.front());
}

}  // namespace edlab
