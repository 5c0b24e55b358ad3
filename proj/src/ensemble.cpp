#include "edlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edlab/error.hpp"
#include "edlab/hydro.hpp"
#include "edlab/ops.hpp"

namespace edlab {
namespace {

constexpr std::uint64_t kInitTag = 0xFFFF'FFFF'0000'0000ULL;

std::size_t nearest_node(const Grid& g, std::size_t axis, double x) {
  const auto n = static_cast<long>(g.points(axis));
  long k = std::lround((x - g.origin(axis)) / g.spacing(axis));
  if (g.periodic(axis)) {
    k %= n;
    if (k < 0) k += n;
  } else {
    k = std::clamp(k, 0L, n - 1);
  }
  return static_cast<std::size_t>(k);
}

// Uniform position inside the cell of node `idx` (cells are one spacing wide
// and centred on their node, also at the ends of open axes).
Point jitter(const Grid& g, std::size_t idx, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Point x = g.position(idx);
  for (std::size_t a = 0; a < g.dims(); ++a) x[a] = g.wrap(a, x[a] + u(rng) * g.spacing(a));
  return x;
}

}  // namespace

Point EnsembleState::position(std::size_t w) const {
  Point x{0.0, 0.0};
  for (std::size_t a = 0; a < dims; ++a) x[a] = positions[w * dims + a];
  return x;
}

std::uint64_t stream_id(std::uint64_t step, std::uint64_t block) {
  return (step << 20) ^ block;
}

EnsembleState init_ensemble(const ScalarField& rho0, std::size_t walkers, std::uint64_t seed) {
  const Grid& g = rho0.grid();
  require_finite(rho0, "initial density");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (rho0[i] < 0.0) {
      fail(ErrorCode::invalid_argument, "initial density is negative at grid index " + std::to_string(i));
    }
  }
  const double mass = integrate(rho0);
  if (std::abs(mass - 1.0) > 1e-6) {
    fail(ErrorCode::invalid_argument, "initial density integrates to " + std::to_string(mass) +
                                          ", expected 1 within 1e-6");
  }
  if (walkers == 0) fail(ErrorCode::invalid_argument, "ensemble needs at least one walker");

  EnsembleState state;
  state.dims = g.dims();
  state.seed = seed;
  state.positions.resize(walkers * g.dims());

  std::vector<double> cdf(g.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    acc += rho0[i];
    cdf[i] = acc;
  }
  const double peak = max_value(rho0);

  const std::size_t blocks = (walkers + kWalkerBlock - 1) / kWalkerBlock;
  for (std::size_t b = 0; b < blocks; ++b) {
    Rng rng = make_stream(seed, kInitTag ^ b);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    const std::size_t end = std::min(walkers, (b + 1) * kWalkerBlock);
    for (std::size_t w = b * kWalkerBlock; w < end; ++w) {
      std::size_t cell;
      if (g.dims() == 1) {
        const double target = u01(rng) * acc;
        cell = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
        cell = std::min(cell, g.size() - 1);
        while (rho0[cell] == 0.0 && cell > 0) --cell;  // target landed exactly on a step edge
      } else {
        do {
          cell = pick(rng);
        } while (u01(rng) * peak >= rho0[cell]);
      }
      const Point x = jitter(g, cell, rng);
      for (std::size_t a = 0; a < g.dims(); ++a) state.positions[w * g.dims() + a] = x[a];
    }
  }
  return state;
}

VectorField drift_from_fields(const ScalarField& rho, const PhaseRecord& phase,
                              const GaugeInput* gauge, const ModelParams& params) {
  VectorField b = current_velocity(rho, phase, gauge, params);
  const VectorField grad_rho = gradient(rho);
  const double floor = kDensityFloor * std::max(max_value(rho), 0.0);
  for (std::size_t a = 0; a < b.dims(); ++a) {
    const double osmotic = 0.5 * params.eta / params.mass_of_axis(a);
    for (std::size_t i = 0; i < b.points(); ++i) {
      if (rho[i] > floor && rho[i] > 0.0) {
        b.at(a, i) += osmotic * grad_rho.at(a, i) / rho[i];
      } else {
        b.at(a, i) = 0.0;
      }
    }
  }
  return b;
}

void evolve_ensemble(EnsembleState& state, const DriftProvider& drift_at, const ModelParams& params,
                     std::size_t n_steps) {
  const std::size_t walkers = state.walkers();
  const std::size_t blocks = (walkers + kWalkerBlock - 1) / kWalkerBlock;
  for (std::size_t s = 0; s < n_steps; ++s) {
    const VectorField drift = drift_at(state.step);
    const Grid& g = drift.grid();
    if (g.dims() != state.dims) fail(ErrorCode::invalid_argument, "drift and ensemble dimensions differ");
    params.validate(g.dims());
    require_finite(drift, "walker drift");
    std::array<double, Grid::kMaxDims> sd{0.0, 0.0};
    for (std::size_t a = 0; a < g.dims(); ++a) sd[a] = std::sqrt(params.eta * params.dt / params.mass_of_axis(a));

    for (std::size_t b = 0; b < blocks; ++b) {
      Rng rng = make_stream(state.seed, stream_id(state.step, b));
      std::normal_distribution<double> normal(0.0, 1.0);
      const std::size_t end = std::min(walkers, (b + 1) * kWalkerBlock);
      for (std::size_t w = b * kWalkerBlock; w < end; ++w) {
        Point x = state.position(w);
        const Point v = interpolate(drift, x);
        for (std::size_t a = 0; a < g.dims(); ++a) {
          double next = x[a] + v[a] * params.dt + sd[a] * normal(rng);
          if (g.periodic(a)) {
            next = g.wrap(a, next);
          } else if (next < g.lower_bound(a) || next > g.upper_bound(a)) {
            next = std::clamp(next, g.lower_bound(a), g.upper_bound(a));
            ++state.clamped;
          }
          state.positions[w * g.dims() + a] = next;
        }
      }
    }
    ++state.step;
    state.time += params.dt;
  }
}

void evolve_ensemble(EnsembleState& state, const VectorField& drift, const ModelParams& params,
                     std::size_t n_steps) {
  evolve_ensemble(state, [&](std::uint64_t) { return drift; }, params, n_steps);
}

ScalarField estimate_density(const EnsembleState& state, const Grid& grid) {
  if (grid.dims() != state.dims) fail(ErrorCode::invalid_argument, "grid and ensemble dimensions differ");
  ScalarField rho(grid);
  const std::size_t walkers = state.walkers();
  if (walkers == 0) return rho;
  for (std::size_t w = 0; w < walkers; ++w) {
    const Point x = state.position(w);
    const std::size_t i = nearest_node(grid, 0, x[0]);
    const std::size_t j = grid.dims() == 2 ? nearest_node(grid, 1, x[1]) : 0;
    rho[grid.index(i, j)] += 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(walkers) * grid.cell_volume());
  for (double& r : rho.values()) r *= scale;
  return rho;
}

DensityDistance compare_densities(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "density comparison");
  DensityDistance d;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a[i] - b[i]);
    sum += diff;
    d.linf = std::max(d.linf, diff);
  }
  d.l1 = sum * a.grid().cell_volume();
  return d;
}

}  // namespace edlab
