#include <doctest.h>

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "edlab/error.hpp"
#include "edlab/gauge.hpp"
#include "edlab/ops.hpp"
#include "edlab/schrodinger.hpp"
#include "oracles.hpp"

using namespace edlab;
using oracle::kPi;
using cplx = std::complex<double>;

namespace {

constexpr cplx kI{0.0, 1.0};

template <class F>
ScalarField sample(const Grid& g, F f) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.position(i));
  return out;
}

template <class F>
ComplexField sample_psi(const Grid& g, F f) {
  ComplexField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.position(i));
  return out;
}

double max_diff(const ComplexField& a, const ComplexField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Grid ring(std::size_t n = 96) { return Grid(Topology::ring, {n}, {2.0 * kPi}); }

GaugeInput wavy_gauge(const Grid& g, double a0) {
  GaugeInput gauge = GaugeInput::zero(g);
  for (std::size_t i = 0; i < g.size(); ++i) gauge.A.at(0, i) = a0 + 0.3 * std::sin(g.position(i)[0]);
  return gauge;
}

ComplexField smooth_psi(const Grid& g) {
  ComplexField psi = sample_psi(g, [](Point x) {
    return (1.0 + 0.3 * std::cos(x[0])) * std::exp(kI * (x[0] + 0.4 * std::sin(2.0 * x[0])));
  });
  const double n = std::sqrt(norm(psi));
  for (cplx& z : psi.values()) z /= n;
  return psi;
}

// Dense Hamiltonian of a 1D grid with link phases, written out row by row.
Eigen::MatrixXcd dense_hamiltonian(const Grid& g, const GaugeInput* gauge, const ScalarField& V,
                                   const ModelParams& p) {
  const auto n = static_cast<Eigen::Index>(g.size());
  const double h = g.spacing(0);
  const double k = p.hbar() * p.hbar() / (2.0 * p.masses[0] * h * h);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    H(i, i) = 2.0 * k + V[static_cast<std::size_t>(i)];
    const bool last = i + 1 == n;
    if (last && !g.periodic(0)) continue;
    const Eigen::Index j = last ? 0 : i + 1;
    const double theta = gauge ? p.eta * p.betas[0] * gauge->A.at(0, static_cast<std::size_t>(i)) * h / p.hbar() : 0.0;
    H(i, j) += -k * std::exp(-kI * theta);
    H(j, i) += -k * std::exp(kI * theta);
  }
  return H;
}

Eigen::VectorXcd to_vector(const ComplexField& psi) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
  return v;
}

}  // namespace

TEST_SUITE("schrodinger") {
  TEST_CASE("compose examples") {
    const Grid g = ring(32);
    const ModelParams p;
    const ComplexField one = madelung_compose(ScalarField(g, 1.0), PhaseRecord(ScalarField(g)), p);
    for (const cplx& z : one.values()) CHECK(z == cplx(1.0, 0.0));

    const double L = 2.0 * kPi;
    const ComplexField wind = madelung_compose(ScalarField(g, 1.0 / L), PhaseRecord(ScalarField(g), {3}, {p.hbar()}), p);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(wind[i] - std::exp(3.0 * kI * g.position(i)[0]) / std::sqrt(L)) <= 1e-13);
    }
  }

  TEST_CASE("decompose inverts compose") {
    const Grid g = ring(64);
    const ModelParams p = ModelParams::with_hbar(0.6);
    const ScalarField rho = sample(g, [](Point x) { return (1.0 + 0.5 * std::sin(x[0])) / (2 * kPi); });
    const ScalarField base = sample(g, [](Point x) { return 0.2 + 0.9 * std::sin(x[0]) * std::cos(2 * x[0]); });
    const PhaseRecord phase(base, {-2}, {p.hbar()});
    const MadelungFields back = madelung_decompose(madelung_compose(rho, phase, p), p);
    CHECK(back.phase.windings == std::vector<int>{-2});
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(back.rho[i] - rho[i]) <= 1e-12);
      CHECK(std::abs(back.phase.base[i] - base[i]) <= 1e-12);
    }
  }

  TEST_CASE("decompose examples: constant, winding 2, node on the path") {
    const Grid g = ring(48);
    const ModelParams p;
    const MadelungFields c = madelung_decompose(ComplexField(g, cplx(1.0)), p);
    CHECK(c.phase.windings == std::vector<int>{0});
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(c.rho[i] == doctest::Approx(1.0));
      CHECK(c.phase.base[i] == 0.0);
    }

    const MadelungFields w = madelung_decompose(sample_psi(g, [](Point x) { return std::exp(2.0 * kI * x[0]); }), p);
    CHECK(w.phase.windings == std::vector<int>{2});
    CHECK(max_abs(w.phase.base) <= 1e-12);

    ComplexField hole(g, cplx(1.0));
    hole[20] = 0.0;
    try {
      madelung_decompose(hole, p);
      FAIL("expected a node error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::node);
      CHECK(std::string(e.what()).find("20") != std::string::npos);
    }
  }

  TEST_CASE("covariant Laplacian without a connection is the plain stencil") {
    const Grid g(Topology::line, {40}, {3.9}, {0.0});
    const ModelParams p;
    const ComplexField psi = sample_psi(g, [](Point x) { return cplx(std::sin(x[0]), x[0] * x[0]); });
    const ComplexField lap = covariant_laplacian(psi, nullptr, p, 0);
    const double h2 = g.spacing(0) * g.spacing(0);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      CHECK(std::abs(lap[i] - (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / h2) <= 1e-10);
    }
    CHECK(std::abs(lap[0] - (psi[1] - 2.0 * psi[0]) / h2) <= 1e-10);
    ModelParams gauged;
    gauged.betas = {0.0};
    const GaugeInput any = wavy_gauge(g, 1.0);
    CHECK(max_diff(covariant_laplacian(psi, &any, gauged, 0), lap) == 0.0);
  }

  TEST_CASE("pure-gauge wave has zero covariant Laplacian") {
    const Grid g = ring(128);
    ModelParams p = ModelParams::with_hbar(0.5);
    p.betas = {0.25};  // eta beta / hbar = 0.5
    GaugeInput gauge = GaugeInput::zero(g);
    for (std::size_t i = 0; i < g.size(); ++i) gauge.A.at(0, i) = 6.0;  // flux 0.5 * 6 * 2 pi = 3 quanta
    const ComplexField psi = sample_psi(g, [](Point x) { return std::exp(kI * 3.0 * x[0]); });
    double worst = 0.0;
    for (const cplx& z : covariant_laplacian(psi, &gauge, p, 0).values()) worst = std::max(worst, std::abs(z));
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("covariant Laplacian transforms with the local phase") {
    const Grid g = ring(96);
    ModelParams p;
    p.betas = {0.7};
    const GaugeInput gauge = wavy_gauge(g, 0.4);
    const ScalarField chi = sample(g, [](Point x) { return 1.1 * std::sin(x[0]) + 0.3 * std::cos(4 * x[0]); });
    const ComplexField psi = smooth_psi(g);
    const GaugeInput moved = gauge_transform(gauge, chi);
    const ComplexField lhs = covariant_laplacian(gauge_transform(psi, chi, p), &moved, p, 0);
    const ComplexField rhs = gauge_transform(covariant_laplacian(psi, &gauge, p, 0), chi, p);
    CHECK(max_diff(lhs, rhs) <= 1e-10);
  }

  TEST_CASE("Crank-Nicolson step matches a dense solve") {
    for (Topology topo : {Topology::ring, Topology::line}) {
      const Grid g(topo, {48}, {6.0}, {-3.0});
      ModelParams p = ModelParams::with_hbar(0.9);
      p.masses = {1.3};
      p.betas = {0.5};
      const GaugeInput gauge = wavy_gauge(g, 0.2);
      const ScalarField V = sample(g, [](Point x) { return 0.3 * x[0] * x[0]; });
      const ComplexField psi = sample_psi(g, [](Point x) { return std::exp(-x[0] * x[0] + kI * 0.5 * x[0]); });
      const double dt = 0.02;
      const Eigen::MatrixXcd H = dense_hamiltonian(g, &gauge, V, p);
      const auto n = H.rows();
      const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(n, n);
      const cplx c = kI * dt / (2.0 * p.hbar());
      const Eigen::VectorXcd expect = (Id + c * H).partialPivLu().solve((Id - c * H) * to_vector(psi));
      const ComplexField got = schrodinger_step(psi, &gauge, V, p, dt);
      CHECK((to_vector(got) - expect).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((to_vector(apply_hamiltonian(psi, &gauge, V, p)) - H * to_vector(psi)).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  TEST_CASE("norm drift stays below 1e-10 per step") {
    const Grid g = ring(128);
    ModelParams p;
    p.betas = {1.0};
    const GaugeInput gauge = wavy_gauge(g, 0.3);
    const ScalarField V = sample(g, [](Point x) { return std::cos(x[0]); });
    const CrankNicolson cn(g, &gauge, V, p, 0.01);
    ComplexField psi = smooth_psi(g);
    for (int k = 0; k < 200; ++k) {
      const double before = norm(psi);
      psi = cn.step(psi);
      CHECK(std::abs(norm(psi) - before) <= 1e-10);
      CHECK(cn.last_residual() <= CrankNicolson::kResidualTolerance);
    }
  }

  TEST_CASE("step is linear") {
    const Grid g = ring(96);
    ModelParams p;
    p.betas = {0.5};
    const GaugeInput gauge = wavy_gauge(g, 0.7);
    const ScalarField V = sample(g, [](Point x) { return std::sin(x[0]); });
    const CrankNicolson cn(g, &gauge, V, p, 0.01);
    const ComplexField a = smooth_psi(g);
    const ComplexField b = sample_psi(g, [](Point x) { return std::exp(-2.0 * kI * x[0]) * (0.5 + 0.1 * std::sin(3 * x[0])); });
    const cplx ca(0.3, -1.2);
    const cplx cb(-0.8, 0.4);
    const ComplexField mix = cn.step(superpose(a, b, ca, cb));
    const ComplexField split = superpose(cn.step(a), cn.step(b), ca, cb);
    CHECK(max_diff(mix, split) <= 1e-10);
  }

  TEST_CASE("free packet width follows the analytic law") {
    const Grid g(Topology::line, {1024}, {60.0}, {-30.0});
    const ModelParams p;
    const double sigma0 = 1.0;
    const ComplexField psi0 = sample_psi(g, [&](Point x) { return std::sqrt(oracle::normal_pdf(x[0], 0.0, sigma0)); });
    const double T = 2.0 * sigma0 * sigma0 / p.hbar();
    const std::size_t steps = 400;
    const CrankNicolson cn(g, nullptr, ScalarField(g), p, T / steps);
    ComplexField psi = psi0;
    for (std::size_t k = 0; k < steps; ++k) psi = cn.step(psi);
    const ScalarField rho = probability_density(psi);
    ScalarField first(g);
    for (std::size_t i = 0; i < g.size(); ++i) first[i] = g.position(i)[0] * rho[i];
    const double mean = integrate(first);
    ScalarField second(g);
    for (std::size_t i = 0; i < g.size(); ++i) second[i] = std::pow(g.position(i)[0] - mean, 2) * rho[i];
    const double width = std::sqrt(integrate(second));
    CHECK(width == doctest::Approx(oracle::free_packet_width(sigma0, p.hbar(), 1.0, T)).epsilon(0.01));
  }

  TEST_CASE("harmonic ground state keeps its modulus and turns its global phase") {
    const Grid g(Topology::line, {512}, {16.0}, {-8.0});
    const ModelParams p;
    const double omega = 1.0;
    const double dt = 1e-3;
    const ScalarField V = sample(g, [&](Point x) { return 0.5 * omega * omega * x[0] * x[0]; });
    ComplexField psi = sample_psi(g, [&](Point x) { return std::sqrt(oracle::normal_pdf(x[0], 0.0, std::sqrt(0.5))); });
    const CrankNicolson cn(g, nullptr, V, p, dt);
    for (int k = 0; k < 20; ++k) {
      const ComplexField next = cn.step(psi);
      cplx overlap = 0.0;
      double mod = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        overlap += std::conj(psi[i]) * next[i];
        mod = std::max(mod, std::abs(std::abs(next[i]) - std::abs(psi[i])));
      }
      CHECK(std::abs(std::arg(overlap) + 0.5 * omega * dt) <= 1e-6);
      CHECK(mod <= 1e-6);
      psi = next;
    }
  }

  TEST_CASE("evolution commutes with gauge transformations") {
    const Grid g = ring(96);
    ModelParams p;
    p.betas = {0.8};
    const GaugeInput gauge = wavy_gauge(g, 0.3);
    const ScalarField chi = sample(g, [](Point x) { return 0.9 * std::cos(x[0]) - 0.5 * std::sin(2 * x[0]); });
    const ScalarField V = sample(g, [](Point x) { return 0.2 * std::sin(x[0]); });
    const CrankNicolson cn(g, &gauge, V, p, 0.01);
    const GaugeInput moved = gauge_transform(gauge, chi);
    const CrankNicolson cn_chi(g, &moved, V, p, 0.01);
    ComplexField a = smooth_psi(g);
    ComplexField b = gauge_transform(a, chi, p);
    for (int k = 0; k < 100; ++k) {
      a = cn.step(a);
      b = cn_chi.step(b);
    }
    CHECK(max_diff(gauge_transform(a, chi, p), b) <= 1e-8);
  }

  TEST_CASE("two-dimensional torus: plane waves are eigenvectors") {
    const Grid g(Topology::torus, {24, 16}, {2 * kPi, 2 * kPi});
    ModelParams p;
    p.axis_particle = {0, 0};
    const ComplexField psi = sample_psi(g, [](Point x) { return std::exp(kI * (2.0 * x[0] - 1.0 * x[1])); });
    const ComplexField hpsi = apply_hamiltonian(psi, nullptr, ScalarField(g), p);
    const double hx = g.spacing(0);
    const double hy = g.spacing(1);
    const double e = (1.0 - std::cos(2.0 * hx)) / (hx * hx) + (1.0 - std::cos(hy)) / (hy * hy);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(hpsi[i] - e * psi[i]) <= 1e-10);
    const ComplexField next = schrodinger_step(psi, nullptr, ScalarField(g), p, 0.05);
    const cplx factor = (1.0 - kI * 0.025 * e) / (1.0 + kI * 0.025 * e);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(next[i] - factor * psi[i]) <= 1e-10);
  }

  TEST_CASE("wave-function operations need a positive hbar") {
    const Grid g = ring(16);
    ModelParams p;
    p.xi = 0.0;
    CHECK_THROWS_AS(schrodinger_step(ComplexField(g, cplx(1.0)), nullptr, ScalarField(g), p, 0.1), Error);
    CHECK_THROWS_AS(madelung_compose(ScalarField(g, 1.0), PhaseRecord(ScalarField(g)), p), Error);
  }
}
