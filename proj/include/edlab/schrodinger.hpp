#pragma once

#include <complex>
#include <memory>

#include "edlab/field.hpp"
#include "edlab/kernel.hpp"
#include "edlab/params.hpp"
#include "edlab/phase.hpp"

namespace edlab {

// |psi|^2 below kNodeFloor * max|psi|^2 counts as a node.
inline constexpr double kNodeFloor = 1e-10;

struct MadelungFields {
  ScalarField rho;
  PhaseRecord phase;
};

// psi = sqrt(rho) exp(i Phi / hbar), using the unrolled phase. When the loop
// phase is not a multiple of 2*pi*hbar the result is discontinuous across the
// seam of the periodic axis.
ComplexField madelung_compose(const ScalarField& rho, const PhaseRecord& phase,
                              const ModelParams& params);

// Inverse of madelung_compose. Windings come from the principal cycles
// through the origin; the residual phase is unwrapped in a row-major sweep
// from the origin (first along axis 0 at j = 0, then up each column). The
// result has loop_quanta = hbar and base(origin) in (-pi hbar, pi hbar].
// Throws ErrorCode::node when |psi|^2 drops below the node floor.
MadelungFields madelung_decompose(const ComplexField& psi, const ModelParams& params);

// Lattice gauge-covariant second derivative summed over the axes owned by
// `particle`: link phases exp(-i (eta beta / hbar) A h) on every link, open
// axes use psi = 0 beyond the end nodes.
ComplexField covariant_laplacian(const ComplexField& psi, const GaugeInput* gauge,
                                 const ModelParams& params, std::size_t particle);

// H psi = sum_n -(hbar^2 / 2 m_n) D_n^2 psi + V psi.
ComplexField apply_hamiltonian(const ComplexField& psi, const GaugeInput* gauge,
                               const ScalarField& V, const ModelParams& params);

double norm(const ComplexField& psi);
ScalarField probability_density(const ComplexField& psi);

// Crank-Nicolson propagator (1 + i dt H / 2hbar) psi' = (1 - i dt H / 2hbar) psi
// with a sparse LU factorization reused across steps.
class CrankNicolson {
 public:
  static constexpr double kResidualTolerance = 1e-10;

  CrankNicolson(const Grid& grid, const GaugeInput* gauge, const ScalarField& V,
                const ModelParams& params, double dt);
  ~CrankNicolson();
  CrankNicolson(CrankNicolson&&) noexcept;
  CrankNicolson& operator=(CrankNicolson&&) noexcept;

  // Throws ErrorCode::numerical when the relative residual of the solve
  // exceeds kResidualTolerance.
  ComplexField step(const ComplexField& psi) const;
  double last_residual() const noexcept { return last_residual_; }
  double dt() const noexcept { return dt_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double dt_ = 0.0;
  mutable double last_residual_ = 0.0;
};

ComplexField schrodinger_step(const ComplexField& psi, const GaugeInput* gauge,
                              const ScalarField& V, const ModelParams& params, double dt);

}  // namespace edlab
