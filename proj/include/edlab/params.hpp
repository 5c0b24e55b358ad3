#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace edlab {

// Physical constants and Lagrange multipliers of the model.
//
// `axis_particle[a]` names the particle that owns configuration axis a, so a
// plane grid can hold one particle in 2D ({0, 0}) or two particles in 1D
// ({0, 1}).
struct ModelParams {
  double eta = 1.0;
  double xi = 0.125;
  std::vector<double> masses{1.0};
  std::vector<double> betas{0.0};
  double c = 1.0;
  double dt = 1e-3;
  std::vector<std::size_t> axis_particle{0};

  double hbar() const { return std::sqrt(8.0 * xi); }
  std::size_t particles() const { return masses.size(); }

  double mass_of_axis(std::size_t axis) const { return masses[axis_particle[axis]]; }
  double beta_of_axis(std::size_t axis) const { return betas[axis_particle[axis]]; }
  // Factor multiplying A on `axis` in the configuration-space connection.
  double coupling_of_axis(std::size_t axis) const { return eta * beta_of_axis(axis); }

  // Throws edlab::Error when the invariants do not hold for a configuration
  // space of `dims` axes.
  void validate(std::size_t dims) const;

  static ModelParams with_hbar(double hbar, double eta = 1.0) {
    ModelParams p;
    p.eta = eta;
    p.xi = hbar * hbar / 8.0;
    return p;
  }
};

}  // namespace edlab
