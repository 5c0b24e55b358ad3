#include "edlab/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edlab/error.hpp"
#include "edlab/ops.hpp"

namespace edlab {
namespace {

// Fields that stay fixed during a step.
struct Frame {
  const ModelParams& params;
  const ScalarField& V;
  VectorField abar;
};

Frame make_frame(const Grid& grid, const GaugeInput* gauge, const ScalarField& V,
                 const ModelParams& params) {
  params.validate(grid.dims());
  if (gauge) {
    require_same_grid(grid, gauge->A.grid(), "gauge A");
    return {params, V, connection(*gauge, params)};
  }
  return {params, V, VectorField(grid)};
}

VectorField velocity(const PhaseRecord& phase, const Frame& f) {
  VectorField v = phase.gradient();
  for (std::size_t a = 0; a < v.dims(); ++a) {
    const double inv_m = 1.0 / f.params.mass_of_axis(a);
    for (std::size_t i = 0; i < v.points(); ++i) v.at(a, i) = inv_m * (v.at(a, i) - f.abar.at(a, i));
  }
  return v;
}

ScalarField fp_rhs(const ScalarField& rho, const PhaseRecord& phase, const Frame& f) {
  VectorField flux = velocity(phase, f);
  for (std::size_t a = 0; a < flux.dims(); ++a) {
    for (std::size_t i = 0; i < flux.points(); ++i) flux.at(a, i) *= rho[i];
  }
  ScalarField out = divergence(flux);
  for (double& x : out.values()) x = -x;
  return out;
}

// u_a = d_a rho / rho, zero below the floor.
VectorField log_density_gradient(const ScalarField& rho) {
  const double floor = kDensityFloor * std::max(max_value(rho), 0.0);
  VectorField u = gradient(rho);
  for (std::size_t a = 0; a < u.dims(); ++a) {
    for (std::size_t i = 0; i < u.points(); ++i) {
      u.at(a, i) = (rho[i] > floor && rho[i] > 0.0) ? u.at(a, i) / rho[i] : 0.0;
    }
  }
  return u;
}

ScalarField quantum_term(const ScalarField& rho, const ModelParams& params) {
  const Grid& g = rho.grid();
  ScalarField q(g);
  const double hbar2 = 8.0 * params.xi;
  if (hbar2 == 0.0) return q;
  const VectorField u = log_density_gradient(rho);
  VectorField w(g);
  for (std::size_t a = 0; a < g.dims(); ++a) {
    const double c = hbar2 / (8.0 * params.mass_of_axis(a));
    for (std::size_t i = 0; i < g.size(); ++i) {
      q[i] += c * u.at(a, i) * u.at(a, i);
      w.at(a, i) = 2.0 * c * u.at(a, i);
    }
  }
  const ScalarField dw = divergence(w);
  const double floor = kDensityFloor * std::max(max_value(rho), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    q[i] = (rho[i] > floor && rho[i] > 0.0) ? q[i] + dw[i] : 0.0;
  }
  return q;
}

ScalarField hj_rhs(const ScalarField& rho, const PhaseRecord& phase, const Frame& f) {
  const Grid& g = rho.grid();
  const VectorField grad = phase.gradient();
  ScalarField out = quantum_term(rho, f.params);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double kinetic = 0.0;
    for (std::size_t a = 0; a < g.dims(); ++a) {
      const double d = grad.at(a, i) - f.abar.at(a, i);
      kinetic += 0.5 * d * d / f.params.mass_of_axis(a);
    }
    out[i] += -kinetic - f.V[i];
  }
  return out;
}

double l2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double linf(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

std::size_t count_below_floor(const ScalarField& rho) {
  const double floor = kDensityFloor * std::max(max_value(rho), 0.0);
  return static_cast<std::size_t>(
      std::count_if(rho.values().begin(), rho.values().end(), [&](double r) { return !(r > floor); }));
}

VectorField current_velocity(const ScalarField& rho, const PhaseRecord& phase,
                             const GaugeInput* gauge, const ModelParams& params) {
  require_same_grid(rho.grid(), phase.grid(), "current velocity");
  const Frame f = make_frame(rho.grid(), gauge, rho, params);
  return velocity(phase, f);
}

ScalarField fokker_planck_rhs(const ScalarField& rho, const PhaseRecord& phase,
                              const GaugeInput* gauge, const ModelParams& params) {
  require_same_grid(rho.grid(), phase.grid(), "Fokker-Planck");
  const Frame f = make_frame(rho.grid(), gauge, rho, params);
  return fp_rhs(rho, phase, f);
}

ScalarField quantum_potential(const ScalarField& rho, const ModelParams& params) {
  require_finite(rho, "density");
  return quantum_term(rho, params);
}

ScalarField hamilton_jacobi_rhs(const ScalarField& rho, const PhaseRecord& phase,
                                const GaugeInput* gauge, const ScalarField& V,
                                const ModelParams& params) {
  require_same_grid(rho.grid(), phase.grid(), "Hamilton-Jacobi");
  require_same_grid(rho.grid(), V.grid(), "potential");
  const Frame f = make_frame(rho.grid(), gauge, V, params);
  return hj_rhs(rho, phase, f);
}

HamiltonianBreakdown ensemble_hamiltonian(const ScalarField& rho, const PhaseRecord& phase,
                                          const GaugeInput* gauge, const ScalarField& V,
                                          const ModelParams& params) {
  const Grid& g = rho.grid();
  require_same_grid(g, phase.grid(), "ensemble Hamiltonian");
  require_same_grid(g, V.grid(), "potential");
  const Frame f = make_frame(g, gauge, V, params);
  const VectorField grad = phase.gradient();
  const VectorField u = log_density_gradient(rho);
  const double hbar2 = 8.0 * params.xi;

  HamiltonianBreakdown h;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t a = 0; a < g.dims(); ++a) {
      const double m = params.mass_of_axis(a);
      const double d = grad.at(a, i) - f.abar.at(a, i);
      h.kinetic += 0.5 * rho[i] * d * d / m;
      if (hbar2 != 0.0) h.quantum += hbar2 / (8.0 * m) * rho[i] * u.at(a, i) * u.at(a, i);
    }
    h.potential += rho[i] * V[i];
  }
  const double dv = g.cell_volume();
  h.kinetic *= dv;
  h.potential *= dv;
  h.quantum *= dv;
  h.total = h.kinetic + h.potential + h.quantum;
  return h;
}

double stability_bound(const Grid& grid, const ModelParams& params) {
  const double hbar = params.hbar();
  if (hbar == 0.0) return std::numeric_limits<double>::infinity();
  double h_min = grid.spacing(0);
  for (std::size_t a = 1; a < grid.dims(); ++a) h_min = std::min(h_min, grid.spacing(a));
  const double m_min = *std::min_element(params.masses.begin(), params.masses.end());
  return kStabilityConstant * h_min * h_min * m_min / hbar;
}

CoupledState step_coupled(const CoupledState& state, const GaugeInput* gauge,
                          const ScalarField& V, const ModelParams& params, double dt) {
  const Grid& g = state.rho.grid();
  require_same_grid(g, state.phase.grid(), "coupled step");
  require_same_grid(g, V.grid(), "potential");
  if (!(dt > 0.0)) fail(ErrorCode::invalid_argument, "dt must be positive");
  const double bound = stability_bound(g, params);
  if (dt > bound) {
    fail(ErrorCode::invalid_argument, "dt = " + std::to_string(dt) +
                                          " exceeds the stability bound C*h^2*m/hbar = " +
                                          std::to_string(bound));
  }
  const Frame f = make_frame(g, gauge, V, params);

  auto advance = [&](const CoupledState& s, const ScalarField& drho, const ScalarField& dphi,
                     double scale) {
    CoupledState out = s;
    for (std::size_t i = 0; i < g.size(); ++i) {
      out.rho[i] += scale * drho[i];
      out.phase.base[i] += scale * dphi[i];
    }
    return out;
  };

  const ScalarField k1r = fp_rhs(state.rho, state.phase, f);
  const ScalarField k1p = hj_rhs(state.rho, state.phase, f);
  const CoupledState s2 = advance(state, k1r, k1p, 0.5 * dt);
  const ScalarField k2r = fp_rhs(s2.rho, s2.phase, f);
  const ScalarField k2p = hj_rhs(s2.rho, s2.phase, f);
  const CoupledState s3 = advance(state, k2r, k2p, 0.5 * dt);
  const ScalarField k3r = fp_rhs(s3.rho, s3.phase, f);
  const ScalarField k3p = hj_rhs(s3.rho, s3.phase, f);
  const CoupledState s4 = advance(state, k3r, k3p, dt);
  const ScalarField k4r = fp_rhs(s4.rho, s4.phase, f);
  const ScalarField k4p = hj_rhs(s4.rho, s4.phase, f);

  CoupledState next = state;
  for (std::size_t i = 0; i < g.size(); ++i) {
    next.rho[i] += dt / 6.0 * (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]);
    next.phase.base[i] += dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
  }
  next.time = state.time + dt;

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(next.rho[i]) || !std::isfinite(next.phase.base[i])) {
      fail(ErrorCode::numerical, "coupled step produced a non-finite value at grid index " +
                                     std::to_string(i) + ", t = " + std::to_string(next.time));
    }
  }
  const double rho_before = l2(state.rho.values());
  const double rho_after = l2(next.rho.values());
  const double phi_scale = std::max(linf(state.phase.base.values()), std::max(params.hbar(), 1.0));
  if (rho_after > 10.0 * rho_before || linf(next.phase.base.values()) > 10.0 * phi_scale) {
    fail(ErrorCode::numerical, "coupled step unstable at t = " + std::to_string(next.time) +
                                   ": field norm grew more than tenfold in one step");
  }
  return next;
}

}  // namespace edlab
