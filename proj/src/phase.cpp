#include "edlab/phase.hpp"

#include <numbers>

#include "edlab/ops.hpp"

namespace edlab {

PhaseRecord::PhaseRecord(ScalarField base_field)
    : base(std::move(base_field)),
      windings(base.grid().dims(), 0),
      loop_quanta(base.grid().dims(), 0.0) {}

PhaseRecord::PhaseRecord(ScalarField base_field, std::vector<int> winding_numbers,
                         std::vector<double> quanta)
    : base(std::move(base_field)),
      windings(std::move(winding_numbers)),
      loop_quanta(std::move(quanta)) {
  const Grid& g = base.grid();
  if (windings.size() != g.dims() || loop_quanta.size() != g.dims()) {
    fail(ErrorCode::invalid_argument, "phase record needs one winding and loop quantum per axis");
  }
  for (std::size_t a = 0; a < g.dims(); ++a) {
    if (!g.periodic(a) && windings[a] != 0) {
      fail(ErrorCode::invalid_argument, "winding on an open axis: the phase cannot loop there");
    }
  }
}

double PhaseRecord::winding_slope(std::size_t axis) const {
  const Grid& g = grid();
  if (!g.periodic(axis)) return 0.0;
  return loop_phase(axis) / g.extent(axis);
}

double PhaseRecord::loop_phase(std::size_t axis) const {
  return 2.0 * std::numbers::pi * loop_quanta[axis] * static_cast<double>(windings[axis]);
}

ScalarField PhaseRecord::unrolled() const {
  const Grid& g = grid();
  ScalarField out = base;
  for (std::size_t a = 0; a < g.dims(); ++a) {
    const double slope = winding_slope(a);
    if (slope == 0.0) continue;
    for (std::size_t i = 0; i < g.size(); ++i) {
      out[i] += slope * static_cast<double>(g.unravel(i)[a]) * g.spacing(a);
    }
  }
  return out;
}

VectorField PhaseRecord::gradient() const {
  VectorField grad = edlab::gradient(base);
  for (std::size_t a = 0; a < grad.dims(); ++a) {
    const double slope = winding_slope(a);
    if (slope == 0.0) continue;
    for (double& v : grad.component(a)) v += slope;
  }
  return grad;
}

}  // namespace edlab
