#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "edlab/field.hpp"
#include "edlab/kernel.hpp"
#include "edlab/params.hpp"
#include "edlab/phase.hpp"

namespace edlab {

inline constexpr double kQuantizationTolerance = 1e-9;

// phi -> phi + chi, A -> A + (lattice gradient of chi on links).
GaugeInput gauge_transform(const GaugeInput& gauge, const ScalarField& chi);
// Phi -> Phi + eta beta chi.
PhaseRecord gauge_transform(const PhaseRecord& phase, const ScalarField& chi,
                            const ModelParams& params);
// psi -> psi exp(i eta beta chi / hbar).
ComplexField gauge_transform(const ComplexField& psi, const ScalarField& chi,
                             const ModelParams& params);

// eta*beta shared by every particle that owns a configuration axis. A single
// configuration-space chi cannot express per-particle shifts with different
// multipliers, so mixed betas are rejected.
double uniform_coupling(const ModelParams& params);

// Closed path along grid edges in which only one particle's coordinates vary.
struct LoopPath {
  struct Edge {
    std::size_t axis;
    int step;  // +1 or -1
  };

  std::vector<std::size_t> points;  // front() == back()
  std::size_t particle = 0;

  std::size_t edges() const noexcept { return points.empty() ? 0 : points.size() - 1; }

  // Checks closure and adjacency against `grid` and returns the edge steps.
  std::vector<Edge> edge_steps(const Grid& grid) const;

  // Non-contractible loop once around periodic `axis`, through the node whose
  // other coordinate index is `offset`.
  static LoopPath principal_cycle(const Grid& grid, std::size_t axis, std::size_t offset = 0,
                                  const ModelParams* params = nullptr);
  // Counter-clockwise rectangle with corners (i0, j0) and (i1, j1).
  static LoopPath rectangle(const Grid& grid, std::size_t i0, std::size_t j0, std::size_t i1,
                            std::size_t j1, const ModelParams* params = nullptr);
  // "axis:<a>[@<offset>]" or "rect:<i0>,<j0>,<i1>,<j1>".
  static LoopPath parse(const Grid& grid, const std::string& spec,
                        const ModelParams* params = nullptr);

  std::string describe(const Grid& grid) const;
};

// Discrete line integral of dPhi around the loop, in units of hbar.
double circulation(const PhaseRecord& phase, const LoopPath& loop, const ModelParams& params);

struct WindingResult {
  int winding = 0;
  double residual = 0.0;
};

inline constexpr double kWindingResidualLimit = 0.1;

// Sum of principal-branch phase increments around the loop over 2*pi.
// Rejects nodes on the loop and loops where a single edge turns the phase by
// more than pi/2 (too coarse to resolve).
WindingResult winding_number(const ComplexField& psi, const LoopPath& loop);

struct QuantizationVerdict {
  std::size_t particle = 0;
  double ratio = 0.0;  // eta beta / hbar
  long mu = 0;
  double deviation = 0.0;
  bool pass = false;
  double tolerance = kQuantizationTolerance;
};

std::vector<QuantizationVerdict> quantization_check(const ModelParams& params,
                                                    double tolerance = kQuantizationTolerance);

struct ChargeReport {
  std::size_t particle = 0;
  double charge = 0.0;        // c eta beta
  double basic_charge = 0.0;  // hbar c
  double units = 0.0;         // charge / basic_charge
  bool quantized = false;
  long mu = 0;
};

ChargeReport charge_from_multiplier(const ModelParams& params, std::size_t particle,
                                    double tolerance = kQuantizationTolerance);

struct RescaledUnits {
  double charge = 0.0;
  double potential = 0.0;
};

RescaledUnits rescale_units(double charge, double potential, double lambda);
VectorField rescale_potential(const VectorField& A, double lambda);

ComplexField superpose(const ComplexField& psi1, const ComplexField& psi2, std::complex<double> a1,
                       std::complex<double> a2);

// Psi continued analytically along a loop: value(k) is psi after k edges,
// with the phase accumulated continuously instead of read on the grid.
struct LoopSampler {
  std::size_t steps = 0;
  std::function<std::complex<double>(std::size_t)> value;
};

LoopSampler continuation_sampler(const ScalarField& rho, const PhaseRecord& phase,
                                 const LoopPath& loop, const ModelParams& params);

// a exp(i rate theta) on a ring-like axis.
struct RingMode {
  std::complex<double> amplitude;
  double rate = 0.0;
};

// Closed-form sum of ring modes, theta advancing 2*pi/n per edge along the
// loop's axis.
LoopSampler ring_sampler(std::vector<RingMode> modes, const LoopPath& loop, const Grid& grid);

LoopSampler superpose(const LoopSampler& s1, const LoopSampler& s2, std::complex<double> a1,
                      std::complex<double> a2);

struct ClosureMismatch {
  double jump_rho = 0.0;
  double jump_psi = 0.0;
};

// Difference between the start and the end of one continuous transport
// around the loop. Nodes are checked on the open path (the end point itself
// may vanish, which is exactly how multivaluedness shows up).
ClosureMismatch loop_closure_mismatch(const LoopSampler& sampler, const LoopPath& loop);

}  // namespace edlab
