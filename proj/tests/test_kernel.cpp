#include <doctest.h>

#include <cmath>

#include "edlab/error.hpp"
#include "edlab/kernel.hpp"
#include "edlab/ops.hpp"
#include "oracles.hpp"

using namespace edlab;

namespace {

constexpr std::size_t kSamples = 100000;

Grid wide_line() { return Grid(Topology::line, {401}, {40.0}, {-20.0}); }

ModelParams params_with(double m, double eta, double dt) {
  ModelParams p;
  p.masses = {m};
  p.eta = eta;
  p.dt = dt;
  return p;
}

template <class F>
ScalarField sample(const Grid& g, F f) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.position(i));
  return out;
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

std::vector<double> displacements(const VectorField& drift, const ModelParams& p, std::uint64_t seed, std::size_t n,
                                  Point from = {0.0, 0.0}) {
  Rng rng = make_stream(seed, 0);
  std::vector<double> out(n);
  for (auto& d : out) d = sample_step(from, drift, p, rng)[0] - from[0];
  return out;
}

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("multiplier alpha is m / (eta dt)") {
    CHECK(multiplier_alpha(params_with(1.0, 1.0, 1.0), 0) == doctest::Approx(1.0));
    CHECK(multiplier_alpha(params_with(2.0, 1.0, 0.5), 0) == doctest::Approx(4.0));
    CHECK(multiplier_alpha(params_with(1.0, 2.0, 0.1), 0) == doctest::Approx(5.0));
    ModelParams bad = params_with(1.0, 1.0, 1.0);
    bad.dt = 0.0;
    CHECK_THROWS_AS(multiplier_alpha(bad, 0), Error);
    bad.dt = -1.0;
    CHECK_THROWS_AS(multiplier_alpha(bad, 0), Error);
  }

  TEST_CASE("drift velocity examples") {
    const Grid g = wide_line();
    const ModelParams p = params_with(1.0, 1.0, 1e-3);
    CHECK(drift_velocity(ScalarField(g, 2.0), nullptr, p, {0.3, 0.0})[0] == 0.0);
    const ScalarField S = sample(g, [](Point x) { return 3.0 * x[0]; });
    CHECK(drift_velocity(S, nullptr, p, {1.234, 0.0})[0] == doctest::Approx(3.0));

    ModelParams q = p;
    q.betas = {1.0};
    GaugeInput gauge = GaugeInput::zero(g);
    for (std::size_t i = 0; i < g.size(); ++i) gauge.A.at(0, i) = 0.7;
    CHECK(drift_velocity(ScalarField(g, 5.0), &gauge, q, {-2.5, 0.0})[0] == doctest::Approx(-0.7));

    // eta/m scaling and the beta (dphi - A) term together
    ModelParams r = params_with(2.0, 3.0, 1e-3);
    r.betas = {0.5};
    GaugeInput g2 = GaugeInput::zero(g);
    g2.phi = sample(g, [](Point x) { return 0.2 * x[0]; });
    for (std::size_t i = 0; i < g.size(); ++i) g2.A.at(0, i) = 1.0;
    const double expect = (3.0 / 2.0) * (3.0 + 0.5 * (0.2 - 1.0));
    CHECK(drift_velocity(S, &g2, r, {0.0, 0.0})[0] == doctest::Approx(expect));
  }

  TEST_CASE("drift velocity rejects positions outside the grid") {
    const Grid g = wide_line();
    CHECK_THROWS_AS(drift_velocity(ScalarField(g), nullptr, params_with(1, 1, 1e-3), {25.0, 0.0}), Error);
  }

  TEST_CASE("kernel spec carries b dt and eta dt / m") {
    const Grid g = wide_line();
    const ModelParams p = params_with(2.0, 1.5, 0.01);
    const VectorField b = drift_field(sample(g, [](Point x) { return 3.0 * x[0]; }), nullptr, p);
    const KernelSpec k = kernel_spec(b, p, {0.0, 0.0});
    CHECK(k.mean_displacement[0] == doctest::Approx(1.5 / 2.0 * 3.0 * 0.01));
    CHECK(k.variance[0] == doctest::Approx(1.5 * 0.01 / 2.0));
  }

  TEST_CASE("zero-drift fluctuations: mean 0 and variance eta dt / m within 3 standard errors") {
    const Grid g = wide_line();
    const ModelParams p = params_with(2.0, 1.0, 0.05);
    const auto d = displacements(VectorField(g), p, 11, kSamples);
    const Moments m = moments(d);
    const double var = p.eta * p.dt / p.masses[0];
    const double n = static_cast<double>(kSamples);
    CHECK(std::abs(m.mean) <= 3.0 * std::sqrt(var / n));
    CHECK(std::abs(m.var - var) <= 3.0 * var * std::sqrt(2.0 / (n - 1.0)));
  }

  TEST_CASE("two-axis fluctuations are uncorrelated with per-particle variances") {
    const Grid g(Topology::plane, {41, 41}, {20.0, 20.0}, {-10.0, -10.0});
    ModelParams p;
    p.masses = {1.0, 4.0};
    p.betas = {0.0, 0.0};
    p.axis_particle = {0, 1};
    p.dt = 0.02;
    Rng rng = make_stream(5, 1);
    const VectorField zero(g);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t k = 0; k < kSamples; ++k) {
      const Point x = sample_step({0.0, 0.0}, zero, p, rng);
      sx += x[0];
      sy += x[1];
      sxx += x[0] * x[0];
      syy += x[1] * x[1];
      sxy += x[0] * x[1];
    }
    const double n = static_cast<double>(kSamples);
    const double vx = p.eta * p.dt / 1.0;
    const double vy = p.eta * p.dt / 4.0;
    CHECK(std::abs(sx / n) <= 3.0 * std::sqrt(vx / n));
    CHECK(std::abs(sy / n) <= 3.0 * std::sqrt(vy / n));
    CHECK(std::abs(sxx / n - vx) <= 3.0 * vx * std::sqrt(2.0 / n));
    CHECK(std::abs(syy / n - vy) <= 3.0 * vy * std::sqrt(2.0 / n));
    CHECK(std::abs(sxy / n) <= 3.0 * std::sqrt(vx * vy / n));
  }

  TEST_CASE("mean displacement equals b dt for a smooth entropy field") {
    const Grid g = wide_line();
    const ModelParams p = params_with(1.0, 1.0, 0.01);
    const ScalarField S = sample(g, [](Point x) { return std::sin(0.3 * x[0]) + 0.1 * x[0] * x[0]; });
    const Point from{1.3, 0.0};
    const double b = drift_velocity(S, nullptr, p, from)[0];
    Rng rng = make_stream(3, 9);
    std::vector<double> d(kSamples);
    for (auto& v : d) v = sample_step(from, S, nullptr, p, rng)[0] - from[0];
    const Moments m = moments(d);
    CHECK(std::abs(m.mean - b * p.dt) <= 3.0 * std::sqrt(p.dt / static_cast<double>(kSamples)));
  }

  TEST_CASE("quartering dt halves the step standard deviation") {
    const Grid g = wide_line();
    const auto a = moments(displacements(VectorField(g), params_with(1, 1, 0.04), 21, kSamples));
    const auto b = moments(displacements(VectorField(g), params_with(1, 1, 0.01), 21, kSamples));
    const double ratio = std::sqrt(a.var / b.var);
    CHECK(std::abs(ratio - 2.0) <= 3.0 * 2.0 * std::sqrt(1.0 / static_cast<double>(kSamples)));
  }

  TEST_CASE("second moment: fluctuation term ~ dt dominates the drift term ~ dt^2 as dt shrinks") {
    const Grid g = wide_line();
    const double b = 3.0;
    VectorField drift(g, b);
    // weighted least squares of <dx^2> = a dt + c dt^2 over dt in 1e-1 .. 1e-4
    double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
    double previous_share = 1.0;
    for (double dt : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const auto d = displacements(drift, params_with(1.0, 1.0, dt), 77, kSamples);
      double m2 = 0.0;
      for (double x : d) m2 += x * x;
      m2 /= static_cast<double>(d.size());
      const double share = (b * dt) * (b * dt) / m2;
      CHECK(share < previous_share);
      previous_share = share;
      const double w = 1.0 / (dt * dt);
      s11 += w * dt * dt;
      s12 += w * dt * dt * dt;
      s22 += w * dt * dt * dt * dt;
      r1 += w * dt * m2;
      r2 += w * dt * dt * m2;
    }
    const double det = s11 * s22 - s12 * s12;
    const double a = (r1 * s22 - r2 * s12) / det;
    const double c = (s11 * r2 - s12 * r1) / det;
    CHECK(a == doctest::Approx(1.0).epsilon(0.02));
    CHECK(c == doctest::Approx(b * b).epsilon(0.1));
    CHECK(previous_share < 1e-2);
  }

  TEST_CASE("log density peaks at the normalization and is symmetric about the mean") {
    const Grid g = wide_line();
    const ModelParams p = params_with(2.0, 1.0, 0.1);
    const ScalarField S = sample(g, [](Point x) { return 0.5 * x[0]; });
    const Point from{0.4, 0.0};
    const double mean = from[0] + drift_velocity(S, nullptr, p, from)[0] * p.dt;
    const double peak = kernel_log_density({mean, 0.0}, from, S, nullptr, p);
    CHECK(peak == doctest::Approx(-0.5 * std::log(2.0 * oracle::kPi * p.eta * p.dt / 2.0)));
    const double up = kernel_log_density({mean + 0.17, 0.0}, from, S, nullptr, p);
    const double down = kernel_log_density({mean - 0.17, 0.0}, from, S, nullptr, p);
    CHECK(up == doctest::Approx(down).epsilon(1e-12));
  }

  TEST_CASE("log density integrates to one") {
    const Grid g = wide_line();
    const ModelParams p = params_with(1.0, 1.0, 0.05);
    const ScalarField S = sample(g, [](Point x) { return std::cos(x[0]); });
    const Point from{0.2, 0.0};
    const std::size_t n = 20001;
    const double lo = -2.0;
    const double h = 4.0 / static_cast<double>(n - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::exp(kernel_log_density({lo + h * i, 0.0}, from, S, nullptr, p)) * h;
    CHECK(std::abs(sum - 1.0) <= 1e-4);
  }

  TEST_CASE("samples fit the log density at the 0.1 percent level") {
    const Grid g = wide_line();
    const ModelParams p = params_with(1.0, 1.0, 0.05);
    const ScalarField S = sample(g, [](Point x) { return std::sin(x[0]); });
    const VectorField b = drift_field(S, nullptr, p);
    const Point from{0.7, 0.0};
    const double sd = std::sqrt(p.eta * p.dt);
    const double center = from[0] + drift_velocity(b, from)[0] * p.dt;
    const int bins = 40;
    const double lo = center - 4.0 * sd;
    const double width = 8.0 * sd / bins;
    std::vector<double> observed(bins + 2, 0.0);
    Rng rng = make_stream(99, 4);
    for (std::size_t k = 0; k < kSamples; ++k) {
      const double x = sample_step(from, b, p, rng)[0];
      const int bin = x < lo ? 0 : std::min(bins + 1, 1 + static_cast<int>((x - lo) / width));
      observed[bin] += 1.0;
    }
    // expected counts from the log density by fine quadrature in every bin;
    // the two tails get the remainder
    std::vector<double> expected(bins + 2, 0.0);
    double inner = 0.0;
    for (int i = 0; i < bins; ++i) {
      const int sub = 200;
      double s = 0.0;
      for (int j = 0; j < sub; ++j) {
        const double x = lo + width * (i + (j + 0.5) / sub);
        s += std::exp(kernel_log_density({x, 0.0}, from, b, p)) * width / sub;
      }
      expected[i + 1] = s * kSamples;
      inner += s;
    }
    expected[0] = expected[bins + 1] = 0.5 * (1.0 - inner) * kSamples;
    CHECK(oracle::chi_squared_p(observed, expected) >= 1e-3);
  }

  TEST_CASE("periodic axes wrap samples and use the minimal image") {
    const Grid g(Topology::ring, {32}, {1.0});
    const ModelParams p = params_with(1.0, 1.0, 0.01);
    const VectorField zero(g);
    Rng rng = make_stream(1, 2);
    for (int k = 0; k < 1000; ++k) {
      const Point x = sample_step({0.99, 0.0}, zero, p, rng);
      CHECK(x[0] >= 0.0);
      CHECK(x[0] < 1.0);
    }
    CHECK(kernel_log_density({0.01, 0.0}, {0.99, 0.0}, zero, p) ==
          doctest::Approx(kernel_log_density({0.99, 0.0}, {0.97, 0.0}, zero, p)));
  }

  TEST_CASE("streams are reproducible and distinct") {
    Rng a = make_stream(42, 7);
    Rng b = make_stream(42, 7);
    Rng c = make_stream(42, 8);
    Rng d = make_stream(43, 7);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
}
