#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace edlab {

enum class Topology { line, ring, plane, torus };

std::string_view to_string(Topology topology);
Topology topology_from_string(std::string_view name);

// A point in configuration space. Only the first `Grid::dims()` entries are
// meaningful.
using Point = std::array<double, 2>;

// Uniform grid over a one- or two-dimensional configuration space.
//
// Node i along an axis sits at origin + i*h. On periodic axes the extent is
// the circumference and h = extent/n; on open axes the extent is the distance
// between the end nodes and h = extent/(n-1). Storage is x-fastest:
// index = i + n0*j.
class Grid {
 public:
  static constexpr std::size_t kMaxDims = 2;
  static constexpr std::size_t kMinPoints = 8;

  Grid(Topology topology, std::vector<std::size_t> points,
       std::vector<double> extent, std::vector<double> origin = {});

  Topology topology() const noexcept { return topology_; }
  std::size_t dims() const noexcept { return dims_; }
  std::size_t points(std::size_t axis) const { return points_[axis]; }
  std::size_t size() const noexcept { return size_; }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  double extent(std::size_t axis) const { return extent_[axis]; }
  double origin(std::size_t axis) const { return origin_[axis]; }
  bool periodic(std::size_t axis) const { return periodic_[axis]; }
  bool any_periodic() const noexcept;
  double cell_volume() const noexcept;

  // Largest extent a walker may occupy along `axis` (open axes include the
  // half cell beyond each end node).
  double lower_bound(std::size_t axis) const;
  double upper_bound(std::size_t axis) const;
  bool contains(const Point& x) const;

  double coordinate(std::size_t axis, std::size_t i) const {
    return origin_[axis] + static_cast<double>(i) * spacing_[axis];
  }
  Point position(std::size_t index) const;

  std::size_t index(std::size_t i, std::size_t j = 0) const { return i + points_[0] * j; }
  std::array<std::size_t, 2> unravel(std::size_t index) const {
    return {index % points_[0], index / points_[0]};
  }
  std::size_t stride(std::size_t axis) const { return axis == 0 ? 1 : points_[0]; }

  // Index of the node `step` positions away along `axis`. Periodic axes wrap;
  // on open axes the caller must stay in range.
  std::size_t shifted(std::size_t index, std::size_t axis, long step) const;

  // Maps a coordinate onto the periodic image inside [origin, origin+extent).
  double wrap(std::size_t axis, double x) const;

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  Topology topology_;
  std::size_t dims_ = 1;
  std::size_t size_ = 0;
  std::array<std::size_t, kMaxDims> points_{1, 1};
  std::array<double, kMaxDims> extent_{0.0, 0.0};
  std::array<double, kMaxDims> origin_{0.0, 0.0};
  std::array<double, kMaxDims> spacing_{1.0, 1.0};
  std::array<bool, kMaxDims> periodic_{false, false};
};

}  // namespace edlab
