#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "edlab/field.hpp"
#include "edlab/kernel.hpp"
#include "edlab/params.hpp"
#include "edlab/phase.hpp"

namespace edlab {

// Walkers are updated in fixed blocks of kWalkerBlock; block b at step k
// draws from make_stream(seed, stream_id(k, b)). Results do not depend on
// how blocks are scheduled.
inline constexpr std::size_t kWalkerBlock = 1024;

struct EnsembleState {
  std::size_t dims = 1;
  std::vector<double> positions;  // walker-major: positions[w * dims + a]
  double time = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::size_t clamped = 0;  // walkers pulled back onto an open boundary

  std::size_t walkers() const noexcept { return dims == 0 ? 0 : positions.size() / dims; }
  Point position(std::size_t w) const;
};

std::uint64_t stream_id(std::uint64_t step, std::uint64_t block);

// Draws walkers i.i.d. from rho0: inverse CDF over cells in 1D, rejection
// sampling over cells in 2D, uniform within the chosen cell.
EnsembleState init_ensemble(const ScalarField& rho0, std::size_t walkers, std::uint64_t seed);

// Walker drift b = m^{-1}(dPhi - Abar) + (eta / 2m) d(rho)/rho on grid nodes:
// current velocity plus osmotic correction. Cells below the density floor
// get zero drift.
VectorField drift_from_fields(const ScalarField& rho, const PhaseRecord& phase,
                              const GaugeInput* gauge, const ModelParams& params);

// Supplies the drift field for a given step index.
using DriftProvider = std::function<VectorField(std::uint64_t step)>;

// n_steps kernel draws per walker, drift taken from `drift_at(state.step)`
// before each draw. Walkers leaving an open axis are clamped to its boundary
// and counted in `clamped`.
void evolve_ensemble(EnsembleState& state, const DriftProvider& drift_at, const ModelParams& params,
                     std::size_t n_steps);
void evolve_ensemble(EnsembleState& state, const VectorField& drift, const ModelParams& params,
                     std::size_t n_steps);

// Normalized histogram on the grid cells (nearest node).
ScalarField estimate_density(const EnsembleState& state, const Grid& grid);

struct DensityDistance {
  double l1 = 0.0;
  double linf = 0.0;
};

DensityDistance compare_densities(const ScalarField& a, const ScalarField& b);

}  // namespace edlab
