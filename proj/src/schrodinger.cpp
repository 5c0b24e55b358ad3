#include "edlab/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "edlab/error.hpp"
#include "edlab/ops.hpp"

namespace edlab {
namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

double principal(double d) {
  d = std::remainder(d, 2.0 * std::numbers::pi);
  if (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
  return d;
}

double require_hbar(const ModelParams& params) {
  const double hbar = params.hbar();
  if (!(hbar > 0.0)) fail(ErrorCode::invalid_argument, "wave-function operations need hbar > 0 (xi > 0)");
  return hbar;
}

bool has_link(const Grid& g, std::size_t i, std::size_t axis) {
  return g.periodic(axis) || g.unravel(i)[axis] + 1 < g.points(axis);
}

// Link phase U(i -> i + e_axis) = exp(-i (eta beta / hbar) A h).
cplx link_phase(const GaugeInput* gauge, const ModelParams& params, double hbar, std::size_t axis,
                std::size_t i, double h) {
  if (!gauge) return 1.0;
  const double theta = params.coupling_of_axis(axis) / hbar * gauge->A.at(axis, i) * h;
  return std::exp(-kI * theta);
}

struct Entry {
  std::size_t row, col;
  cplx value;
};

// Sparse H: kinetic links plus diagonal potential.
std::vector<Entry> hamiltonian_entries(const Grid& g, const GaugeInput* gauge, const ScalarField* V,
                                       const ModelParams& params) {
  const double hbar = require_hbar(params);
  std::vector<Entry> out;
  out.reserve(g.size() * (1 + 2 * g.dims()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx diag = V ? cplx((*V)[i]) : cplx(0.0);
    for (std::size_t a = 0; a < g.dims(); ++a) {
      const double h = g.spacing(a);
      const double kappa = -hbar * hbar / (2.0 * params.mass_of_axis(a) * h * h);
      diag += -2.0 * kappa;
      if (has_link(g, i, a)) {
        const std::size_t j = g.shifted(i, a, 1);
        const cplx u = link_phase(gauge, params, hbar, a, i, h);
        out.push_back({i, j, kappa * u});
        out.push_back({j, i, kappa * std::conj(u)});
      }
    }
    out.push_back({i, i, diag});
  }
  return out;
}

void check_gauge(const Grid& g, const GaugeInput* gauge) {
  if (gauge) require_same_grid(g, gauge->A.grid(), "gauge A");
}

}  // namespace

ComplexField madelung_compose(const ScalarField& rho, const PhaseRecord& phase,
                              const ModelParams& params) {
  require_same_grid(rho.grid(), phase.grid(), "Madelung compose");
  const double hbar = require_hbar(params);
  const ScalarField total = phase.unrolled();
  ComplexField psi(rho.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    psi[i] = std::sqrt(std::max(rho[i], 0.0)) * std::exp(kI * (total[i] / hbar));
  }
  return psi;
}

MadelungFields madelung_decompose(const ComplexField& psi, const ModelParams& params) {
  const Grid& g = psi.grid();
  const double hbar = require_hbar(params);
  ScalarField rho(g);
  for (std::size_t i = 0; i < g.size(); ++i) rho[i] = std::norm(psi[i]);
  const double floor = kNodeFloor * max_value(rho);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(rho[i] >= floor) || rho[i] == 0.0) {
      const Point x = g.position(i);
      std::string where = "x = " + std::to_string(x[0]);
      if (g.dims() == 2) where += ", y = " + std::to_string(x[1]);
      fail(ErrorCode::node, "node on the unwrapping path at grid index " + std::to_string(i) +
                                " (" + where + ")");
    }
  }

  std::vector<double> arg(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) arg[i] = std::arg(psi[i]);

  std::vector<int> windings(g.dims(), 0);
  for (std::size_t a = 0; a < g.dims(); ++a) {
    if (!g.periodic(a)) continue;
    double turn = 0.0;
    std::size_t i = 0;
    for (std::size_t k = 0; k < g.points(a); ++k) {
      const std::size_t j = g.shifted(i, a, 1);
      turn += principal(arg[j] - arg[i]);
      i = j;
    }
    windings[a] = static_cast<int>(std::lround(turn / (2.0 * std::numbers::pi)));
  }

  // Residual phase after removing the winding ramps.
  std::vector<double> resid(arg);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ij = g.unravel(i);
    for (std::size_t a = 0; a < g.dims(); ++a) {
      if (windings[a] == 0) continue;
      resid[i] -= 2.0 * std::numbers::pi * windings[a] * static_cast<double>(ij[a]) /
                  static_cast<double>(g.points(a));
    }
  }

  ScalarField base(g);
  const std::size_t nx = g.points(0);
  const std::size_t ny = g.dims() == 2 ? g.points(1) : 1;
  std::vector<double> unwrapped(g.size());
  unwrapped[0] = principal(resid[0]);
  for (std::size_t i = 1; i < nx; ++i) {
    unwrapped[i] = unwrapped[i - 1] + principal(resid[i] - resid[i - 1]);
  }
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 1; j < ny; ++j) {
      const std::size_t k = g.index(i, j), km = g.index(i, j - 1);
      unwrapped[k] = unwrapped[km] + principal(resid[k] - resid[km]);
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) base[i] = hbar * unwrapped[i];

  return {std::move(rho), PhaseRecord(std::move(base), windings, std::vector<double>(g.dims(), hbar))};
}

ComplexField covariant_laplacian(const ComplexField& psi, const GaugeInput* gauge,
                                 const ModelParams& params, std::size_t particle) {
  const Grid& g = psi.grid();
  check_gauge(g, gauge);
  params.validate(g.dims());
  const double hbar = require_hbar(params);
  ComplexField out(g);
  for (std::size_t a = 0; a < g.dims(); ++a) {
    if (params.axis_particle[a] != particle) continue;
    const double h = g.spacing(a);
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < g.size(); ++i) {
      cplx acc = -2.0 * psi[i];
      if (has_link(g, i, a)) acc += link_phase(gauge, params, hbar, a, i, h) * psi[g.shifted(i, a, 1)];
      if (g.periodic(a) || g.unravel(i)[a] > 0) {
        const std::size_t j = g.shifted(i, a, -1);
        acc += std::conj(link_phase(gauge, params, hbar, a, j, h)) * psi[j];
      }
      out[i] += acc * inv_h2;
    }
  }
  return out;
}

ComplexField apply_hamiltonian(const ComplexField& psi, const GaugeInput* gauge,
                               const ScalarField& V, const ModelParams& params) {
  const Grid& g = psi.grid();
  check_gauge(g, gauge);
  require_same_grid(g, V.grid(), "potential");
  params.validate(g.dims());
  ComplexField out(g);
  for (const Entry& e : hamiltonian_entries(g, gauge, &V, params)) out[e.row] += e.value * psi[e.col];
  return out;
}

double norm(const ComplexField& psi) {
  double s = 0.0;
  for (const cplx& z : psi.values()) s += std::norm(z);
  return s * psi.grid().cell_volume();
}

ScalarField probability_density(const ComplexField& psi) {
  ScalarField rho(psi.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
  return rho;
}

struct CrankNicolson::Impl {
  explicit Impl(Grid g) : grid(std::move(g)) {}
  Grid grid;
  Eigen::SparseMatrix<cplx> lhs;
  Eigen::SparseMatrix<cplx> rhs;
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
};

CrankNicolson::CrankNicolson(const Grid& grid, const GaugeInput* gauge, const ScalarField& V,
                             const ModelParams& params, double dt)
    : impl_(std::make_unique<Impl>(grid)), dt_(dt) {
  check_gauge(grid, gauge);
  require_same_grid(grid, V.grid(), "potential");
  params.validate(grid.dims());
  if (!(dt > 0.0)) fail(ErrorCode::invalid_argument, "dt must be positive");
  const double hbar = require_hbar(params);
  const cplx tau = kI * (dt / (2.0 * hbar));

  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::Triplet<cplx>> l, r;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    l.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    r.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  }
  for (const Entry& e : hamiltonian_entries(grid, gauge, &V, params)) {
    l.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), tau * e.value);
    r.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), -tau * e.value);
  }
  impl_->lhs.resize(n, n);
  impl_->rhs.resize(n, n);
  impl_->lhs.setFromTriplets(l.begin(), l.end());
  impl_->rhs.setFromTriplets(r.begin(), r.end());
  impl_->lhs.makeCompressed();
  impl_->lu.compute(impl_->lhs);
  if (impl_->lu.info() != Eigen::Success) {
    fail(ErrorCode::numerical, "Crank-Nicolson factorization failed: " + impl_->lu.lastErrorMessage());
  }
}

CrankNicolson::~CrankNicolson() = default;
CrankNicolson::CrankNicolson(CrankNicolson&&) noexcept = default;
CrankNicolson& CrankNicolson::operator=(CrankNicolson&&) noexcept = default;

ComplexField CrankNicolson::step(const ComplexField& psi) const {
  require_same_grid(impl_->grid, psi.grid(), "Crank-Nicolson step");
  const auto n = static_cast<Eigen::Index>(psi.size());
  Eigen::Map<const Eigen::VectorXcd> in(psi.values().data(), n);
  const Eigen::VectorXcd b = impl_->rhs * in;
  Eigen::VectorXcd x = impl_->lu.solve(b);
  const double bn = b.norm();
  last_residual_ = bn > 0.0 ? (impl_->lhs * x - b).norm() / bn : (impl_->lhs * x).norm();
  if (impl_->lu.info() != Eigen::Success || !(last_residual_ <= kResidualTolerance)) {
    fail(ErrorCode::numerical, "Crank-Nicolson solve did not converge: relative residual " +
                                   std::to_string(last_residual_));
  }
  ComplexField out(psi.grid());
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = x[i];
  return out;
}

ComplexField schrodinger_step(const ComplexField& psi, const GaugeInput* gauge,
                              const ScalarField& V, const ModelParams& params, double dt) {
  return CrankNicolson(psi.grid(), gauge, V, params, dt).step(psi);
}

}  // namespace edlab
