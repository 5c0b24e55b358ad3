#include "edlab/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "edlab/error.hpp"
#include "edlab/ops.hpp"

namespace edlab {
namespace {

void require_inside(const Grid& g, const Point& x) {
  if (!g.contains(x)) {
    std::string where = "(" + std::to_string(x[0]);
    if (g.dims() == 2) where += ", " + std::to_string(x[1]);
    fail(ErrorCode::invalid_argument, "position " + where + ") lies outside the grid");
  }
}

void check_gauge_grid(const Grid& g, const GaugeInput& gauge) {
  require_same_grid(g, gauge.phi.grid(), "gauge phi");
  require_same_grid(g, gauge.A.grid(), "gauge A");
}

}  // namespace

VectorField corrected_angle_gradient(const GaugeInput& gauge) {
  require_same_grid(gauge.phi.grid(), gauge.A.grid(), "gauge input");
  require_finite(gauge.A, "gauge A");
  VectorField links = link_difference(gauge.phi, /*angle=*/true);
  for (std::size_t a = 0; a < links.dims(); ++a) {
    for (std::size_t i = 0; i < links.points(); ++i) links.at(a, i) -= gauge.A.at(a, i);
  }
  return links_to_nodes(links);
}

VectorField connection(const GaugeInput& gauge, const ModelParams& params) {
  require_finite(gauge.A, "gauge A");
  VectorField out = links_to_nodes(gauge.A);
  for (std::size_t a = 0; a < out.dims(); ++a) {
    const double g = params.coupling_of_axis(a);
    for (double& v : out.component(a)) v *= g;
  }
  return out;
}

double multiplier_alpha(const ModelParams& params, std::size_t particle) {
  if (!(params.dt > 0.0)) fail(ErrorCode::invalid_argument, "dt must be positive");
  if (particle >= params.masses.size()) fail(ErrorCode::invalid_argument, "unknown particle index");
  return params.masses[particle] / (params.eta * params.dt);
}

VectorField drift_field(const ScalarField& S, const GaugeInput* gauge, const ModelParams& params) {
  const Grid& g = S.grid();
  params.validate(g.dims());
  VectorField b = gradient(S);
  if (gauge) {
    check_gauge_grid(g, *gauge);
    const VectorField corrected = corrected_angle_gradient(*gauge);
    for (std::size_t a = 0; a < g.dims(); ++a) {
      const double beta = params.beta_of_axis(a);
      for (std::size_t i = 0; i < g.size(); ++i) b.at(a, i) += beta * corrected.at(a, i);
    }
  }
  for (std::size_t a = 0; a < g.dims(); ++a) {
    const double scale = params.eta / params.mass_of_axis(a);
    for (double& v : b.component(a)) v *= scale;
  }
  return b;
}

Point drift_velocity(const VectorField& drift, const Point& x) {
  require_inside(drift.grid(), x);
  return interpolate(drift, x);
}

Point drift_velocity(const ScalarField& S, const GaugeInput* gauge, const ModelParams& params,
                     const Point& x) {
  require_inside(S.grid(), x);
  return interpolate(drift_field(S, gauge, params), x);
}

KernelSpec kernel_spec(const VectorField& drift, const ModelParams& params, const Point& x) {
  KernelSpec spec;
  spec.dims = drift.dims();
  spec.dt = params.dt;
  const Point b = drift_velocity(drift, x);
  for (std::size_t a = 0; a < spec.dims; ++a) {
    spec.mean_displacement[a] = b[a] * params.dt;
    spec.variance[a] = params.eta * params.dt / params.mass_of_axis(a);
  }
  return spec;
}

Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Point sample_step(const Point& x, const VectorField& drift, const ModelParams& params, Rng& rng) {
  const Grid& g = drift.grid();
  const Point b = drift_velocity(drift, x);
  std::normal_distribution<double> normal(0.0, 1.0);
  Point out = x;
  for (std::size_t a = 0; a < g.dims(); ++a) {
    const double sd = std::sqrt(params.eta * params.dt / params.mass_of_axis(a));
    out[a] = g.wrap(a, x[a] + b[a] * params.dt + sd * normal(rng));
  }
  return out;
}

Point sample_step(const Point& x, const ScalarField& S, const GaugeInput* gauge,
                  const ModelParams& params, Rng& rng) {
  return sample_step(x, drift_field(S, gauge, params), params, rng);
}

double kernel_log_density(const Point& to, const Point& from, const VectorField& drift,
                          const ModelParams& params) {
  const Grid& g = drift.grid();
  const KernelSpec spec = kernel_spec(drift, params, from);
  double log_p = 0.0;
  for (std::size_t a = 0; a < g.dims(); ++a) {
    double d = to[a] - from[a];
    if (g.periodic(a)) d = std::remainder(d, g.extent(a));
    const double r = d - spec.mean_displacement[a];
    const double var = spec.variance[a];
    log_p += -0.5 * (r * r / var + std::log(2.0 * std::numbers::pi * var));
  }
  return log_p;
}

double kernel_log_density(const Point& to, const Point& from, const ScalarField& S,
                          const GaugeInput* gauge, const ModelParams& params) {
  return kernel_log_density(to, from, drift_field(S, gauge, params), params);
}

}  // namespace edlab
