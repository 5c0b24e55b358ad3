#include "edlab/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "edlab/error.hpp"
#include "edlab/ops.hpp"

namespace edlab {
namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double principal(double d) {
  d = std::remainder(d, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

std::size_t owner(const ModelParams* params, std::size_t axis) {
  return params ? params->axis_particle.at(axis) : 0;
}

void require_hbar(const ModelParams& params) {
  if (!(params.hbar() > 0.0)) fail(ErrorCode::invalid_argument, "this operation needs hbar > 0");
}

}  // namespace

double uniform_coupling(const ModelParams& params) {
  const double beta = params.betas.at(params.axis_particle.at(0));
  for (std::size_t a = 1; a < params.axis_particle.size(); ++a) {
    if (params.betas.at(params.axis_particle[a]) != beta) {
      fail(ErrorCode::invalid_argument,
           "gauge transformation of a multi-particle configuration needs equal betas");
    }
  }
  return params.eta * beta;
}

GaugeInput gauge_transform(const GaugeInput& gauge, const ScalarField& chi) {
  require_same_grid(gauge.phi.grid(), chi.grid(), "gauge transform");
  require_finite(chi, "gauge function chi");
  GaugeInput out = gauge;
  for (std::size_t i = 0; i < chi.size(); ++i) out.phi[i] += chi[i];
  const VectorField dchi = link_difference(chi);
  for (std::size_t a = 0; a < out.A.dims(); ++a) {
    for (std::size_t i = 0; i < out.A.points(); ++i) out.A.at(a, i) += dchi.at(a, i);
  }
  out.chi = chi;
  return out;
}

PhaseRecord gauge_transform(const PhaseRecord& phase, const ScalarField& chi,
                            const ModelParams& params) {
  require_same_grid(phase.grid(), chi.grid(), "gauge transform");
  require_finite(chi, "gauge function chi");
  const double g = uniform_coupling(params);
  PhaseRecord out = phase;
  for (std::size_t i = 0; i < chi.size(); ++i) out.base[i] += g * chi[i];
  return out;
}

ComplexField gauge_transform(const ComplexField& psi, const ScalarField& chi,
                             const ModelParams& params) {
  require_same_grid(psi.grid(), chi.grid(), "gauge transform");
  require_finite(chi, "gauge function chi");
  require_hbar(params);
  const double g = uniform_coupling(params) / params.hbar();
  ComplexField out = psi;
  for (std::size_t i = 0; i < chi.size(); ++i) out[i] *= std::exp(cplx(0.0, g * chi[i]));
  return out;
}

std::vector<LoopPath::Edge> LoopPath::edge_steps(const Grid& grid) const {
  if (points.size() < 3) fail(ErrorCode::invalid_argument, "loop needs at least two edges");
  if (points.front() != points.back()) fail(ErrorCode::invalid_argument, "loop is not closed");
  std::vector<Edge> out;
  out.reserve(edges());
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const std::size_t p = points[k], q = points[k + 1];
    if (p >= grid.size() || q >= grid.size()) fail(ErrorCode::invalid_argument, "loop leaves the grid");
    bool found = false;
    for (std::size_t a = 0; a < grid.dims() && !found; ++a) {
      for (int s : {+1, -1}) {
        const long k_axis = static_cast<long>(grid.unravel(p)[a]) + s;
        if (!grid.periodic(a) && (k_axis < 0 || k_axis >= static_cast<long>(grid.points(a)))) continue;
        if (grid.shifted(p, a, s) == q) {
          out.push_back({a, s});
          found = true;
          break;
        }
      }
    }
    if (!found) {
      fail(ErrorCode::invalid_argument, "loop points " + std::to_string(p) + " and " +
                                            std::to_string(q) + " are not grid neighbours");
    }
  }
  return out;
}

LoopPath LoopPath::principal_cycle(const Grid& grid, std::size_t axis, std::size_t offset,
                                   const ModelParams* params) {
  if (axis >= grid.dims() || !grid.periodic(axis)) {
    fail(ErrorCode::invalid_argument, "principal cycles exist only along periodic axes");
  }
  const std::size_t other = 1 - axis;
  if (grid.dims() == 2 && offset >= grid.points(other)) {
    fail(ErrorCode::invalid_argument, "loop offset outside the grid");
  }
  LoopPath loop;
  loop.particle = owner(params, axis);
  std::size_t start = grid.dims() == 2 ? (axis == 0 ? grid.index(0, offset) : grid.index(offset, 0)) : 0;
  std::size_t p = start;
  loop.points.push_back(p);
  for (std::size_t k = 0; k < grid.points(axis); ++k) {
    p = grid.shifted(p, axis, 1);
    loop.points.push_back(p);
  }
  return loop;
}

LoopPath LoopPath::rectangle(const Grid& grid, std::size_t i0, std::size_t j0, std::size_t i1,
                             std::size_t j1, const ModelParams* params) {
  if (grid.dims() != 2) fail(ErrorCode::invalid_argument, "rectangular loops need a 2D grid");
  if (!(i0 < i1 && j0 < j1 && i1 < grid.points(0) && j1 < grid.points(1))) {
    fail(ErrorCode::invalid_argument, "rectangle corners must satisfy i0 < i1, j0 < j1 inside the grid");
  }
  if (owner(params, 0) != owner(params, 1)) {
    fail(ErrorCode::invalid_argument,
         "a rectangle moves two particles at once; loops may vary one particle only");
  }
  LoopPath loop;
  loop.particle = owner(params, 0);
  for (std::size_t i = i0; i < i1; ++i) loop.points.push_back(grid.index(i, j0));
  for (std::size_t j = j0; j < j1; ++j) loop.points.push_back(grid.index(i1, j));
  for (std::size_t i = i1; i > i0; --i) loop.points.push_back(grid.index(i, j1));
  for (std::size_t j = j1; j > j0; --j) loop.points.push_back(grid.index(i0, j));
  loop.points.push_back(grid.index(i0, j0));
  return loop;
}

LoopPath LoopPath::parse(const Grid& grid, const std::string& spec, const ModelParams* params) {
  auto bad = [&]() -> void { fail(ErrorCode::invalid_argument, "cannot parse loop spec '" + spec + "'"); };
  try {
    if (spec.rfind("axis:", 0) == 0) {
      std::string rest = spec.substr(5);
      std::size_t offset = 0;
      if (auto at = rest.find('@'); at != std::string::npos) {
        offset = std::stoul(rest.substr(at + 1));
        rest = rest.substr(0, at);
      }
      return principal_cycle(grid, std::stoul(rest), offset, params);
    }
    if (spec.rfind("rect:", 0) == 0) {
      std::stringstream ss(spec.substr(5));
      std::vector<std::size_t> c;
      std::string tok;
      while (std::getline(ss, tok, ',')) c.push_back(std::stoul(tok));
      if (c.size() != 4) bad();
      return rectangle(grid, c[0], c[1], c[2], c[3], params);
    }
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::invalid_argument, "cannot parse loop spec '" + spec + "'");
}

std::string LoopPath::describe(const Grid& grid) const {
  const auto steps = edge_steps(grid);
  std::ostringstream os;
  os << steps.size() << " edges from grid index " << points.front() << ", particle " << particle;
  return os.str();
}

double circulation(const PhaseRecord& phase, const LoopPath& loop, const ModelParams& params) {
  require_hbar(params);
  const Grid& g = phase.grid();
  const auto steps = loop.edge_steps(g);
  double total = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const std::size_t p = loop.points[k], q = loop.points[k + 1];
    const auto [axis, s] = steps[k];
    total += phase.base[q] - phase.base[p] + phase.winding_slope(axis) * s * g.spacing(axis);
  }
  return total / params.hbar();
}

WindingResult winding_number(const ComplexField& psi, const LoopPath& loop) {
  const Grid& g = psi.grid();
  loop.edge_steps(g);
  double peak = 0.0;
  for (std::size_t p : loop.points) peak = std::max(peak, std::norm(psi[p]));
  for (std::size_t p : loop.points) {
    if (!(std::norm(psi[p]) >= 1e-10 * peak) || peak == 0.0) {
      fail(ErrorCode::node, "node on the loop at grid index " + std::to_string(p));
    }
  }
  double turn = 0.0;
  for (std::size_t k = 0; k + 1 < loop.points.size(); ++k) {
    const double d = principal(std::arg(psi[loop.points[k + 1]]) - std::arg(psi[loop.points[k]]));
    if (std::abs(d) > 0.5 * std::numbers::pi) {
      fail(ErrorCode::invalid_argument, "phase turns by more than pi/2 on one loop edge; refine the grid");
    }
    turn += d;
  }
  const double turns = turn / kTwoPi;
  WindingResult r;
  r.winding = static_cast<int>(std::lround(turns));
  r.residual = std::abs(turns - r.winding);
  if (r.residual > kWindingResidualLimit) {
    fail(ErrorCode::numerical, "winding residual " + std::to_string(r.residual) + " exceeds 0.1");
  }
  return r;
}

std::vector<QuantizationVerdict> quantization_check(const ModelParams& params, double tolerance) {
  require_hbar(params);
  std::vector<QuantizationVerdict> out;
  for (std::size_t n = 0; n < params.betas.size(); ++n) {
    QuantizationVerdict v;
    v.particle = n;
    v.ratio = params.eta * params.betas[n] / params.hbar();
    v.mu = std::lround(v.ratio);
    v.deviation = std::abs(v.ratio - static_cast<double>(v.mu));
    v.tolerance = tolerance;
    v.pass = v.deviation <= tolerance;
    out.push_back(v);
  }
  return out;
}

ChargeReport charge_from_multiplier(const ModelParams& params, std::size_t particle, double tolerance) {
  if (particle >= params.betas.size()) fail(ErrorCode::invalid_argument, "unknown particle index");
  ChargeReport r;
  r.particle = particle;
  r.charge = params.c * params.eta * params.betas[particle];
  r.basic_charge = params.hbar() * params.c;
  if (r.basic_charge != 0.0) {
    r.units = r.charge / r.basic_charge;
    r.mu = std::lround(r.units);
    r.quantized = std::abs(r.units - static_cast<double>(r.mu)) <= tolerance;
  }
  return r;
}

RescaledUnits rescale_units(double charge, double potential, double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda)) fail(ErrorCode::invalid_argument, "lambda must be non-zero");
  return {lambda * charge, potential / lambda};
}

VectorField rescale_potential(const VectorField& A, double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda)) fail(ErrorCode::invalid_argument, "lambda must be non-zero");
  VectorField out = A;
  for (double& v : out.values()) v /= lambda;
  return out;
}

ComplexField superpose(const ComplexField& psi1, const ComplexField& psi2, cplx a1, cplx a2) {
  require_same_grid(psi1.grid(), psi2.grid(), "superposition");
  ComplexField out(psi1.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a1 * psi1[i] + a2 * psi2[i];
  return out;
}

LoopSampler continuation_sampler(const ScalarField& rho, const PhaseRecord& phase,
                                 const LoopPath& loop, const ModelParams& params) {
  require_same_grid(rho.grid(), phase.grid(), "continuation sampler");
  require_hbar(params);
  const Grid& g = rho.grid();
  const auto steps = loop.edge_steps(g);
  const ScalarField unrolled = phase.unrolled();
  std::vector<cplx> values;
  values.reserve(loop.points.size());
  double running = unrolled[loop.points.front()];
  const double hbar = params.hbar();
  for (std::size_t k = 0; k < loop.points.size(); ++k) {
    const std::size_t p = loop.points[k];
    if (k > 0) {
      const std::size_t prev = loop.points[k - 1];
      const auto [axis, s] = steps[k - 1];
      running += phase.base[p] - phase.base[prev] + phase.winding_slope(axis) * s * g.spacing(axis);
    }
    values.push_back(std::sqrt(std::max(rho[p], 0.0)) * std::exp(cplx(0.0, running / hbar)));
  }
  return {steps.size(), [values = std::move(values)](std::size_t k) { return values.at(k); }};
}

LoopSampler ring_sampler(std::vector<RingMode> modes, const LoopPath& loop, const Grid& grid) {
  const auto steps = loop.edge_steps(grid);
  const std::size_t axis = steps.front().axis;
  for (const auto& e : steps) {
    if (e.axis != axis) fail(ErrorCode::invalid_argument, "ring modes need a loop along a single axis");
  }
  if (!grid.periodic(axis)) fail(ErrorCode::invalid_argument, "ring modes need a periodic axis");
  const double dtheta = kTwoPi / static_cast<double>(grid.points(axis));
  std::vector<double> theta(loop.points.size());
  theta[0] = dtheta * static_cast<double>(grid.unravel(loop.points.front())[axis]);
  for (std::size_t k = 1; k < theta.size(); ++k) theta[k] = theta[k - 1] + steps[k - 1].step * dtheta;
  return {steps.size(), [modes = std::move(modes), theta = std::move(theta)](std::size_t k) {
            cplx sum = 0.0;
            for (const auto& m : modes) sum += m.amplitude * std::exp(cplx(0.0, m.rate * theta.at(k)));
            return sum;
          }};
}

LoopSampler superpose(const LoopSampler& s1, const LoopSampler& s2, cplx a1, cplx a2) {
  if (s1.steps != s2.steps) fail(ErrorCode::invalid_argument, "samplers follow loops of different length");
  return {s1.steps, [s1, s2, a1, a2](std::size_t k) { return a1 * s1.value(k) + a2 * s2.value(k); }};
}

ClosureMismatch loop_closure_mismatch(const LoopSampler& sampler, const LoopPath& loop) {
  if (sampler.steps != loop.edges()) {
    fail(ErrorCode::invalid_argument, "sampler and loop have different numbers of edges");
  }
  double peak = 0.0;
  std::vector<double> mags(sampler.steps);
  for (std::size_t k = 0; k < sampler.steps; ++k) {
    mags[k] = std::norm(sampler.value(k));
    peak = std::max(peak, mags[k]);
  }
  for (std::size_t k = 0; k < sampler.steps; ++k) {
    if (!(mags[k] >= 1e-10 * peak) || peak == 0.0) {
      fail(ErrorCode::node, "node on the transport path after " + std::to_string(k) + " edges");
    }
  }
  const cplx start = sampler.value(0);
  const cplx end = sampler.value(sampler.steps);
  return {std::abs(std::norm(end) - std::norm(start)), std::abs(end - start)};
}

}  // namespace edlab
