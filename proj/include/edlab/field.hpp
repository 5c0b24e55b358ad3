#pragma once

#include <complex>
#include <span>
#include <vector>

#include "edlab/error.hpp"
#include "edlab/grid.hpp"

namespace edlab {

template <class T>
class GridField {
 public:
  using value_type = T;

  explicit GridField(Grid grid, T fill = T{})
      : grid_(std::move(grid)), values_(grid_.size(), fill) {}

  GridField(Grid grid, std::vector<T> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      fail(ErrorCode::invalid_argument, "field value count does not match grid point count");
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

 private:
  Grid grid_;
  std::vector<T> values_;
};

using ScalarField = GridField<double>;
using ComplexField = GridField<std::complex<double>>;

// One real component per axis per grid point, stored axis-major.
class VectorField {
 public:
  explicit VectorField(Grid grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(grid_.size() * grid_.dims(), fill) {}

  const Grid& grid() const noexcept { return grid_; }
  std::size_t dims() const noexcept { return grid_.dims(); }
  std::size_t points() const noexcept { return grid_.size(); }

  double& at(std::size_t axis, std::size_t i) { return values_[axis * grid_.size() + i]; }
  double at(std::size_t axis, std::size_t i) const { return values_[axis * grid_.size() + i]; }

  std::span<double> component(std::size_t axis) {
    return std::span<double>(values_).subspan(axis * grid_.size(), grid_.size());
  }
  std::span<const double> component(std::size_t axis) const {
    return std::span<const double>(values_).subspan(axis * grid_.size(), grid_.size());
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace edlab
