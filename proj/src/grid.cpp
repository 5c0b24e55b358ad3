#include "edlab/grid.hpp"

#include <cmath>
#include <string>

#include "edlab/error.hpp"

namespace edlab {

std::string_view to_string(Topology topology) {
  switch (topology) {
    case Topology::line: return "line";
    case Topology::ring: return "ring";
    case Topology::plane: return "plane";
    case Topology::torus: return "torus";
  }
  return "line";
}

Topology topology_from_string(std::string_view name) {
  if (name == "line") return Topology::line;
  if (name == "ring") return Topology::ring;
  if (name == "plane") return Topology::plane;
  if (name == "torus") return Topology::torus;
  fail(ErrorCode::invalid_argument, "unknown topology '" + std::string(name) + "'");
}

Grid::Grid(Topology topology, std::vector<std::size_t> points, std::vector<double> extent,
           std::vector<double> origin)
    : topology_(topology) {
  dims_ = (topology == Topology::line || topology == Topology::ring) ? 1 : 2;
  const bool wraps = topology == Topology::ring || topology == Topology::torus;
  if (points.size() != dims_ || extent.size() != dims_) {
    fail(ErrorCode::invalid_argument, "grid '" + std::string(to_string(topology)) + "' needs " +
                                          std::to_string(dims_) + " point counts and extents");
  }
  if (!origin.empty() && origin.size() != dims_) {
    fail(ErrorCode::invalid_argument, "grid origin has the wrong number of axes");
  }
  size_ = 1;
  for (std::size_t a = 0; a < dims_; ++a) {
    if (points[a] < kMinPoints) {
      fail(ErrorCode::invalid_argument, "grid needs at least 8 points per axis");
    }
    if (!(extent[a] > 0.0) || !std::isfinite(extent[a])) {
      fail(ErrorCode::invalid_argument, "grid extent must be positive and finite");
    }
    points_[a] = points[a];
    extent_[a] = extent[a];
    origin_[a] = origin.empty() ? 0.0 : origin[a];
    periodic_[a] = wraps;
    spacing_[a] = wraps ? extent[a] / static_cast<double>(points[a])
                        : extent[a] / static_cast<double>(points[a] - 1);
    size_ *= points[a];
  }
}

bool Grid::any_periodic() const noexcept {
  for (std::size_t a = 0; a < dims_; ++a) {
    if (periodic_[a]) return true;
  }
  return false;
}

double Grid::cell_volume() const noexcept {
  double v = 1.0;
  for (std::size_t a = 0; a < dims_; ++a) v *= spacing_[a];
  return v;
}

double Grid::lower_bound(std::size_t axis) const {
  return periodic_[axis] ? origin_[axis] : origin_[axis] - 0.5 * spacing_[axis];
}

double Grid::upper_bound(std::size_t axis) const {
  return periodic_[axis] ? origin_[axis] + extent_[axis]
                         : origin_[axis] + extent_[axis] + 0.5 * spacing_[axis];
}

bool Grid::contains(const Point& x) const {
  for (std::size_t a = 0; a < dims_; ++a) {
    if (!std::isfinite(x[a])) return false;
    if (periodic_[a]) continue;
    if (x[a] < lower_bound(a) || x[a] > upper_bound(a)) return false;
  }
  return true;
}

Point Grid::position(std::size_t index) const {
  const auto ij = unravel(index);
  Point x{0.0, 0.0};
  for (std::size_t a = 0; a < dims_; ++a) x[a] = coordinate(a, ij[a]);
  return x;
}

std::size_t Grid::shifted(std::size_t index, std::size_t axis, long step) const {
  auto ij = unravel(index);
  const auto n = static_cast<long>(points_[axis]);
  long k = static_cast<long>(ij[axis]) + step;
  if (periodic_[axis]) {
    k %= n;
    if (k < 0) k += n;
  }
  ij[axis] = static_cast<std::size_t>(k);
  return this->index(ij[0], ij[1]);
}

double Grid::wrap(std::size_t axis, double x) const {
  if (!periodic_[axis]) return x;
  const double L = extent_[axis];
  double r = std::fmod(x - origin_[axis], L);
  if (r < 0.0) r += L;
  if (r >= L) r = 0.0;
  return origin_[axis] + r;
}

bool operator==(const Grid& a, const Grid& b) {
  if (a.topology_ != b.topology_ || a.dims_ != b.dims_) return false;
  for (std::size_t k = 0; k < a.dims_; ++k) {
    if (a.points_[k] != b.points_[k] || a.extent_[k] != b.extent_[k] ||
        a.origin_[k] != b.origin_[k]) {
      return false;
    }
  }
  return true;
}

}  // namespace edlab
