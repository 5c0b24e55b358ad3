#pragma once

#include <vector>

#include "edlab/field.hpp"

namespace edlab {

// A possibly multi-valued phase Phi (action units).
//
// The grid holds the single-valued part `base`; around the non-contractible
// loop of periodic axis a the phase additionally advances by
// 2*pi * loop_quanta[a] * windings[a]. For a plain winding state
// loop_quanta = hbar; for a phase inherited from an angle field phi that winds
// nu times, loop_quanta = eta*beta and windings = nu. Windings on open axes
// must be zero.
struct PhaseRecord {
  ScalarField base;
  std::vector<int> windings;
  std::vector<double> loop_quanta;

  explicit PhaseRecord(ScalarField base_field);
  PhaseRecord(ScalarField base_field, std::vector<int> winding_numbers,
              std::vector<double> quanta);

  const Grid& grid() const noexcept { return base.grid(); }

  // Uniform contribution of the winding to d(Phi)/dx_a.
  double winding_slope(std::size_t axis) const;
  // Total phase advance around the principal cycle of `axis`.
  double loop_phase(std::size_t axis) const;

  // Phi on the grid with the winding unrolled from the origin; it jumps by
  // loop_phase across the seam of each periodic axis.
  ScalarField unrolled() const;
  VectorField gradient() const;
};

}  // namespace edlab
