#include <doctest.h>

#include <cmath>

#include "edlab/error.hpp"
#include "edlab/gauge.hpp"
#include "edlab/hydro.hpp"
#include "edlab/ops.hpp"
#include "edlab/schrodinger.hpp"
#include "oracles.hpp"

using namespace edlab;
using oracle::kPi;

namespace {

template <class F>
ScalarField sample(const Grid& g, F f) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.position(i));
  return out;
}

ScalarField normalized(ScalarField f) {
  const double m = integrate(f);
  for (double& v : f.values()) v /= m;
  return f;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Grid unit_ring(std::size_t n = 128) { return Grid(Topology::ring, {n}, {2.0 * kPi}); }

// Smooth nodeless ring state with a winding and a wobbling base phase.
CoupledState ring_state(const Grid& g, const ModelParams& p, int winding = 1) {
  ScalarField rho = normalized(sample(g, [](Point x) { return 1.0 + 0.4 * std::cos(x[0]); }));
  ScalarField base = sample(g, [](Point x) { return 0.3 * std::sin(2.0 * x[0]); });
  return {rho, PhaseRecord(base, {winding}, {p.hbar()}), 0.0};
}

ScalarField harmonic(const Grid& g, double omega, double m = 1.0) {
  return sample(g, [&](Point x) { return 0.5 * m * omega * omega * x[0] * x[0]; });
}

ScalarField ground_density(const Grid& g, double omega, double hbar, double m = 1.0) {
  return normalized(sample(g, [&](Point x) { return std::exp(-m * omega * x[0] * x[0] / hbar); }));
}

GaugeInput ring_gauge(const Grid& g, double a0) {
  GaugeInput gauge = GaugeInput::zero(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.position(i)[0];
    gauge.A.at(0, i) = a0 + 0.2 * std::cos(x + 0.5 * g.spacing(0));
    gauge.phi[i] = std::remainder(x + 0.1 * std::sin(x), 2.0 * kPi);
  }
  return gauge;
}

ScalarField smooth_chi(const Grid& g) {
  return sample(g, [](Point x) { return 0.7 * std::sin(x[0]) - 0.4 * std::cos(3.0 * x[0]) + 0.2; });
}

}  // namespace

TEST_SUITE("hydro") {
  TEST_CASE("current velocity vanishes when the phase gradient equals the connection") {
    const Grid g = unit_ring();
    ModelParams p;
    p.betas = {1.0};
    GaugeInput gauge = GaugeInput::zero(g);
    for (std::size_t i = 0; i < g.size(); ++i) gauge.A.at(0, i) = 1.0;
    const PhaseRecord phase(ScalarField(g), {1}, {p.hbar()});
    const VectorField v = current_velocity(ScalarField(g, 1.0 / (2 * kPi)), phase, &gauge, p);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(v.at(0, i)) <= 1e-14);
  }

  TEST_CASE("winding state velocity is 2 pi m hbar / L") {
    const double L = 5.0;
    const Grid g(Topology::ring, {64}, {L});
    const ModelParams p = ModelParams::with_hbar(0.7);
    for (int m : {-2, 1, 3}) {
      const PhaseRecord phase(ScalarField(g, 0.25), {m}, {p.hbar()});
      const VectorField v = current_velocity(ScalarField(g, 1.0 / L), phase, nullptr, p);
      for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(v.at(0, i) == doctest::Approx(2 * kPi * m * p.hbar() / L).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("current velocity is gauge invariant") {
    const Grid g = unit_ring();
    ModelParams p;
    p.betas = {0.8};
    const CoupledState s = ring_state(g, p);
    const GaugeInput gauge = ring_gauge(g, 0.3);
    const ScalarField chi = smooth_chi(g);
    const VectorField v0 = current_velocity(s.rho, s.phase, &gauge, p);
    const GaugeInput gauge1 = gauge_transform(gauge, chi);
    const VectorField v1 = current_velocity(s.rho, gauge_transform(s.phase, chi, p), &gauge1, p);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(v0.at(0, i) - v1.at(0, i)) <= 1e-12);
  }

  TEST_CASE("Fokker-Planck right-hand side examples") {
    const Grid ring = unit_ring();
    ModelParams p;
    const ScalarField wavy = normalized(sample(ring, [](Point x) { return 2.0 + std::sin(x[0]); }));
    CHECK(max_abs(fokker_planck_rhs(wavy, PhaseRecord(ScalarField(ring, 1.5)), nullptr, p)) == 0.0);
    const ScalarField flat(ring, 1.0 / (2 * kPi));
    CHECK(max_abs(fokker_planck_rhs(flat, PhaseRecord(ScalarField(ring), {2}, {p.hbar()}), nullptr, p)) <= 1e-15);

    // Gaussian density under a plane wave: -(p/m) d(rho)/dx
    const Grid line(Topology::line, {801}, {16.0}, {-8.0});
    p.masses = {1.7};
    const double k = 0.9;
    const ScalarField rho = sample(line, [](Point x) { return oracle::normal_pdf(x[0], 0.3, 1.0); });
    const PhaseRecord phase(sample(line, [&](Point x) { return k * x[0]; }));
    const ScalarField rhs = fokker_planck_rhs(rho, phase, nullptr, p);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < line.size(); ++i) {
      const double x = line.position(i)[0];
      const double exact = (k / 1.7) * (x - 0.3) * oracle::normal_pdf(x, 0.3, 1.0);
      worst = std::max(worst, std::abs(rhs[i] - exact));
    }
    CHECK(worst <= 1e-4);
  }

  TEST_CASE("quantum potential examples") {
    const Grid ring = unit_ring();
    ModelParams p;
    CHECK(max_abs(quantum_potential(ScalarField(ring, 1.0 / (2 * kPi)), p)) <= 1e-15);

    const Grid line(Topology::line, {201}, {10.0}, {-5.0});
    const ScalarField rho = ground_density(line, 1.0, 1.0);
    p.xi = 0.0;
    const ScalarField q0 = quantum_potential(rho, p);
    for (double v : q0.values()) CHECK(v == 0.0);
  }

  TEST_CASE("harmonic ground state: d(Phi)/dt = -hbar omega / 2 in the bulk") {
    const Grid line(Topology::line, {1601}, {12.0}, {-6.0});
    for (double omega : {1.0, 2.5}) {
      const ModelParams p = ModelParams::with_hbar(0.8);
      const ScalarField rho = ground_density(line, omega, p.hbar());
      const ScalarField rhs =
          hamilton_jacobi_rhs(rho, PhaseRecord(ScalarField(line)), nullptr, harmonic(line, omega), p);
      for (std::size_t i = 0; i < line.size(); ++i) {
        // within three widths; the stencil error grows like (x h)^2 outside
        if (std::abs(line.position(i)[0]) > 3.0 * std::sqrt(p.hbar() / (2.0 * omega))) continue;
        CHECK(rhs[i] == doctest::Approx(-0.5 * p.hbar() * omega).epsilon(1e-2));
      }
    }
  }

  TEST_CASE("Hamilton-Jacobi right-hand side: rest state and plane wave") {
    const double L = 3.0;
    const Grid g(Topology::ring, {64}, {L});
    ModelParams p;
    p.masses = {2.0};
    const ScalarField flat(g, 1.0 / L);
    CHECK(max_abs(hamilton_jacobi_rhs(flat, PhaseRecord(ScalarField(g, 0.4)), nullptr, ScalarField(g), p)) <= 1e-15);
    const int m = 3;
    const ScalarField rhs =
        hamilton_jacobi_rhs(flat, PhaseRecord(ScalarField(g), {m}, {p.hbar()}), nullptr, ScalarField(g), p);
    const double k = 2 * kPi * m * p.hbar() / L;
    for (double v : rhs.values()) CHECK(v == doctest::Approx(-k * k / (2.0 * 2.0)).epsilon(1e-13));
  }

  TEST_CASE("ensemble Hamiltonian of a Gaussian at rest is hbar^2 / (8 sigma^2)") {
    const Grid line(Topology::line, {1601}, {24.0}, {-12.0});
    for (double sigma : {0.8, 1.0, 1.7}) {
      const ModelParams p = ModelParams::with_hbar(1.3);
      const ScalarField rho = sample(line, [&](Point x) { return oracle::normal_pdf(x[0], 0.0, sigma); });
      const HamiltonianBreakdown h =
          ensemble_hamiltonian(rho, PhaseRecord(ScalarField(line, 2.0)), nullptr, ScalarField(line), p);
      CHECK(h.kinetic == 0.0);
      CHECK(h.potential == 0.0);
      CHECK(h.total == doctest::Approx(oracle::gaussian_fisher_energy(sigma, p.hbar(), 1.0)).epsilon(1e-4));
    }
  }

  TEST_CASE("ensemble Hamiltonian of the harmonic ground state is hbar omega / 2") {
    const Grid line(Topology::line, {1025}, {12.0}, {-6.0});
    const ModelParams p;
    const HamiltonianBreakdown h = ensemble_hamiltonian(ground_density(line, 1.0, 1.0), PhaseRecord(ScalarField(line)),
                                                        nullptr, harmonic(line, 1.0), p);
    CHECK(h.total == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(h.total == doctest::Approx(h.kinetic + h.potential + h.quantum));

    ModelParams classical;
    classical.xi = 0.0;
    const HamiltonianBreakdown h0 =
        ensemble_hamiltonian(ground_density(line, 1.0, 1.0), PhaseRecord(ScalarField(line)), nullptr, ScalarField(line), classical);
    CHECK(h0.total == 0.0);
  }

  TEST_CASE("breakdown terms are non-negative for arbitrary smooth states") {
    const Grid g = unit_ring();
    ModelParams p;
    p.betas = {0.6};
    const CoupledState s = ring_state(g, p, -2);
    const GaugeInput gauge = ring_gauge(g, 0.1);
    const HamiltonianBreakdown h = ensemble_hamiltonian(s.rho, s.phase, &gauge, ScalarField(g, -0.2), p);
    CHECK(h.kinetic >= 0.0);
    CHECK(h.quantum >= 0.0);
    CHECK(h.potential == doctest::Approx(-0.2));
    CHECK(h.total == doctest::Approx(h.kinetic + h.potential + h.quantum));
  }

  TEST_CASE("right-hand sides are the functional derivatives of the ensemble Hamiltonian") {
    ModelParams p;
    p.betas = {0.6};
    for (std::size_t n : {64, 128}) {
      const Grid g = unit_ring(n);
      const CoupledState s = ring_state(g, p);
      const GaugeInput gauge = ring_gauge(g, 0.1);
      const ScalarField V = sample(g, [](Point x) { return 0.3 * std::cos(x[0]); });
      const ScalarField drho = fokker_planck_rhs(s.rho, s.phase, &gauge, p);
      const ScalarField dphi = hamilton_jacobi_rhs(s.rho, s.phase, &gauge, V, p);
      const double cell = g.cell_volume();
      double err = 0.0;
      for (std::size_t i : {std::size_t{0}, n / 5, n / 2, n - 3}) {
        const double eps = 1e-5;
        CoupledState up = s;
        CoupledState dn = s;
        up.phase.base[i] += eps;
        dn.phase.base[i] -= eps;
        const double dH_dphi = (ensemble_hamiltonian(up.rho, up.phase, &gauge, V, p).total -
                                ensemble_hamiltonian(dn.rho, dn.phase, &gauge, V, p).total) /
                               (2 * eps * cell);
        up = s;
        dn = s;
        up.rho[i] += eps * s.rho[i];
        dn.rho[i] -= eps * s.rho[i];
        const double dH_drho = (ensemble_hamiltonian(up.rho, up.phase, &gauge, V, p).total -
                                ensemble_hamiltonian(dn.rho, dn.phase, &gauge, V, p).total) /
                               (2 * eps * s.rho[i] * cell);
        const double scale_rho = max_abs(drho);
        const double scale_phi = max_abs(dphi);
        err = std::max(err, std::abs(dH_dphi - drho[i]) / scale_rho);
        err = std::max(err, std::abs(dH_drho + dphi[i]) / scale_phi);
      }
      CHECK(err <= 1e-4);
    }
  }

  TEST_CASE("harmonic ground state is stationary under one coupled step") {
    const Grid line(Topology::line, {256}, {10.0}, {-5.0});
    const ModelParams p;
    const double dt = 1e-3;
    const CoupledState s{ground_density(line, 1.0, 1.0), PhaseRecord(ScalarField(line)), 0.0};
    const CoupledState next = step_coupled(s, nullptr, harmonic(line, 1.0), p, dt);
    CHECK(max_diff(next.rho, s.rho) <= 1e-8);
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (std::abs(line.position(i)[0]) > 3.0) continue;
      CHECK(next.phase.base[i] == doctest::Approx(-0.5 * dt).epsilon(1e-3));
    }
    CHECK(next.time == doctest::Approx(dt));
  }

  TEST_CASE("1000 coupled steps conserve the Hamiltonian and the norm") {
    const Grid g = unit_ring();
    ModelParams p;
    p.betas = {1.0};
    const GaugeInput gauge = ring_gauge(g, 0.3);
    const ScalarField V = sample(g, [](Point x) { return 0.5 * std::cos(x[0]); });
    CoupledState s = ring_state(g, p, 2);
    const double dt = 0.5 * stability_bound(g, p);
    const double h0 = ensemble_hamiltonian(s.rho, s.phase, &gauge, V, p).total;
    for (int k = 0; k < 1000; ++k) s = step_coupled(s, &gauge, V, p, dt);
    const double h1 = ensemble_hamiltonian(s.rho, s.phase, &gauge, V, p).total;
    CHECK(std::abs(h1 - h0) / std::abs(h0) <= 1e-6);
    CHECK(std::abs(integrate(s.rho) - 1.0) <= 1e-8);
    CHECK(s.phase.windings == std::vector<int>{2});
  }

  TEST_CASE("stability bound and instability detection") {
    const Grid g = unit_ring(64);
    const ModelParams p;
    const double h = g.spacing(0);
    CHECK(stability_bound(g, p) == doctest::Approx(h * h));
    const CoupledState s = ring_state(g, p);
    CHECK_THROWS_AS(step_coupled(s, nullptr, ScalarField(g), p, 1.01 * h * h), Error);
    CHECK_THROWS_AS(step_coupled(s, nullptr, ScalarField(g), p, 0.0), Error);

    ModelParams classical;
    classical.xi = 0.0;
    CoupledState steep{s.rho, PhaseRecord(sample(g, [](Point x) { return 40.0 * std::sin(x[0]); })), 0.0};
    bool numerical = false;
    try {
      for (int k = 0; k < 50; ++k) steep = step_coupled(steep, nullptr, ScalarField(g), classical, 0.5);
    } catch (const Error& e) {
      numerical = e.code() == ErrorCode::numerical;
    }
    CHECK(numerical);
  }

  TEST_CASE("gauge-transformed trajectories give the same density") {
    const Grid g = unit_ring();
    ModelParams p;
    p.betas = {0.7};
    const GaugeInput gauge = ring_gauge(g, 0.2);
    const ScalarField chi = smooth_chi(g);
    const GaugeInput gauge1 = gauge_transform(gauge, chi);
    CoupledState a = ring_state(g, p);
    CoupledState b{a.rho, gauge_transform(a.phase, chi, p), 0.0};
    const double dt = 0.5 * stability_bound(g, p);
    for (int k = 0; k < 200; ++k) {
      a = step_coupled(a, &gauge, ScalarField(g), p, dt);
      b = step_coupled(b, &gauge1, ScalarField(g), p, dt);
    }
    CHECK(max_diff(a.rho, b.rho) <= 1e-8);
    double phase_err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      phase_err = std::max(phase_err, std::abs(b.phase.base[i] - a.phase.base[i] - 0.7 * chi[i]));
    }
    CHECK(phase_err <= 1e-8);
  }

  TEST_CASE("coupled fields converge to the Schroedinger evolution") {
    // same physical time, h halved and dt quartered
    const ModelParams p;
    const double T = 0.2;
    std::vector<double> errors;
    for (std::size_t n : {64, 128, 256}) {
      const Grid g = unit_ring(n);
      CoupledState s = ring_state(g, p, 1);
      const GaugeInput gauge = ring_gauge(g, 0.0);
      const ScalarField V = sample(g, [](Point x) { return 0.4 * std::sin(x[0]); });
      const auto steps = static_cast<std::size_t>(std::ceil(T / (0.5 * stability_bound(g, p))));
      const double dt = T / static_cast<double>(steps);
      const CrankNicolson cn(g, &gauge, V, p, dt);
      ComplexField psi = madelung_compose(s.rho, s.phase, p);
      for (std::size_t k = 0; k < steps; ++k) {
        s = step_coupled(s, &gauge, V, p, dt);
        psi = cn.step(psi);
      }
      errors.push_back(max_diff(s.rho, probability_density(psi)));
    }
    MESSAGE("errors " << errors[0] << " " << errors[1] << " " << errors[2]);
    CHECK(errors[0] / errors[1] >= 3.0);
    CHECK(errors[1] / errors[2] >= 3.0);
    CHECK(errors[2] <= 1e-4);
  }
}
