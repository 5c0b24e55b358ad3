#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "edlab/field.hpp"
#include "edlab/params.hpp"

namespace edlab {

// Gauge potentials in configuration-space form.
//
// `phi` is angle-valued (radians, defined modulo 2*pi); its derivatives are
// taken on the principal branch so it may wind around periodic axes. `A` is a
// link field: component a stored at node i is the connection sampled at the
// midpoint of the link from node i to node i+e_a. Storing A on links makes
// the lattice gauge transformation A -> A + (chi(i+e_a) - chi(i))/h exact for
// both the hydrodynamic and the lattice Schroedinger discretizations.
struct GaugeInput {
  ScalarField phi;
  VectorField A;
  std::optional<ScalarField> chi;

  static GaugeInput zero(const Grid& grid) { return {ScalarField(grid), VectorField(grid), {}}; }
};

// Node values of the gauge-corrected angle derivative d(phi) - A.
VectorField corrected_angle_gradient(const GaugeInput& gauge);

// Node values of the configuration-space connection eta*beta_n*A_a.
VectorField connection(const GaugeInput& gauge, const ModelParams& params);

struct KernelSpec {
  std::size_t dims = 1;
  Point mean_displacement{0.0, 0.0};
  Point variance{0.0, 0.0};
  double dt = 0.0;
};

double multiplier_alpha(const ModelParams& params, std::size_t particle);

// Drift velocity b on grid nodes: (eta/m) [dS + beta (dphi - A)], the gauge
// term dropped when `gauge` is null.
VectorField drift_field(const ScalarField& S, const GaugeInput* gauge, const ModelParams& params);

// Drift at an arbitrary position, by multilinear interpolation of
// drift_field. Positions outside the grid are rejected.
Point drift_velocity(const ScalarField& S, const GaugeInput* gauge, const ModelParams& params,
                     const Point& x);
Point drift_velocity(const VectorField& drift, const Point& x);

KernelSpec kernel_spec(const VectorField& drift, const ModelParams& params, const Point& x);

using Rng = std::mt19937_64;

// Stream `stream` of the family derived from `master`. Every stochastic
// component draws from make_stream(master, tag-specific id), so results are
// reproducible bit for bit given the seed.
Rng make_stream(std::uint64_t master, std::uint64_t stream);

// One kernel draw: x' = x + b dt + dw, dw ~ N(0, eta dt / m_n) per axis.
// Periodic axes wrap the result.
Point sample_step(const Point& x, const VectorField& drift, const ModelParams& params, Rng& rng);
Point sample_step(const Point& x, const ScalarField& S, const GaugeInput* gauge,
                  const ModelParams& params, Rng& rng);

// Log of the Gaussian transition density including its normalization.
// Displacements along periodic axes use the minimal image.
double kernel_log_density(const Point& to, const Point& from, const VectorField& drift,
                          const ModelParams& params);
double kernel_log_density(const Point& to, const Point& from, const ScalarField& S,
                          const GaugeInput* gauge, const ModelParams& params);

}  // namespace edlab
