#pragma once

#include <cstddef>

#include "edlab/field.hpp"
#include "edlab/kernel.hpp"
#include "edlab/params.hpp"
#include "edlab/phase.hpp"

namespace edlab {

// Densities below kDensityFloor * max(rho) are treated as empty wherever the
// equations divide by rho or sqrt(rho).
inline constexpr double kDensityFloor = 1e-12;

// dt <= kStabilityConstant * h_min^2 * m_min / hbar for step_coupled.
inline constexpr double kStabilityConstant = 1.0;

struct HamiltonianBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double quantum = 0.0;
  double total = 0.0;
};

struct CoupledState {
  ScalarField rho;
  PhaseRecord phase;
  double time = 0.0;
};

std::size_t count_below_floor(const ScalarField& rho);

// v^A = m^{AB} (d_B Phi - Abar_B). `gauge` may be null.
VectorField current_velocity(const ScalarField& rho, const PhaseRecord& phase,
                             const GaugeInput* gauge, const ModelParams& params);

// d(rho)/dt = -div(rho v).
ScalarField fokker_planck_rhs(const ScalarField& rho, const PhaseRecord& phase,
                              const GaugeInput* gauge, const ModelParams& params);

// The quantum term as it enters d(Phi)/dt:
//   (hbar^2 / 2) m^{AB} d_A d_B sqrt(rho) / sqrt(rho).
// It is evaluated as (hbar^2 / 8m)(u^2 + 2 du) with u = d(rho)/rho, which is
// the exact discrete functional derivative of the Fisher term of the
// ensemble Hamiltonian. Cells below the density floor contribute zero.
ScalarField quantum_potential(const ScalarField& rho, const ModelParams& params);

// d(Phi)/dt = -(1/2) m^{AB}(dPhi - Abar)(dPhi - Abar) - V + quantum_potential.
ScalarField hamilton_jacobi_rhs(const ScalarField& rho, const PhaseRecord& phase,
                                const GaugeInput* gauge, const ScalarField& V,
                                const ModelParams& params);

HamiltonianBreakdown ensemble_hamiltonian(const ScalarField& rho, const PhaseRecord& phase,
                                          const GaugeInput* gauge, const ScalarField& V,
                                          const ModelParams& params);

double stability_bound(const Grid& grid, const ModelParams& params);

// One classical RK4 step of Hamilton's equations for (rho, Phi). Windings are
// topological and carried over unchanged. Throws ErrorCode::numerical when
// the step produces non-finite values or a field norm grows more than tenfold.
CoupledState step_coupled(const CoupledState& state, const GaugeInput* gauge,
                          const ScalarField& V, const ModelParams& params, double dt);

}  // namespace edlab
