#include "edlab/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace edlab {
namespace {

double principal(double d) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  d = std::remainder(d, two_pi);
  if (d <= -std::numbers::pi) d += two_pi;
  return d;
}

// Second-order derivative of samples along one axis at node k.
template <class Sample>
double axis_derivative(const Grid& g, std::size_t idx, std::size_t axis, Sample&& f) {
  const double h = g.spacing(axis);
  const std::size_t n = g.points(axis);
  const std::size_t k = g.unravel(idx)[axis];
  if (g.periodic(axis) || (k > 0 && k + 1 < n)) {
    return (f(g.shifted(idx, axis, 1)) - f(g.shifted(idx, axis, -1))) / (2.0 * h);
  }
  if (k == 0) {
    return (-3.0 * f(idx) + 4.0 * f(g.shifted(idx, axis, 1)) - f(g.shifted(idx, axis, 2))) /
           (2.0 * h);
  }
  return (3.0 * f(idx) - 4.0 * f(g.shifted(idx, axis, -1)) + f(g.shifted(idx, axis, -2))) /
         (2.0 * h);
}

struct AxisWeights {
  std::size_t lo = 0;
  double t = 0.0;
  std::size_t hi = 0;
};

AxisWeights locate(const Grid& g, std::size_t axis, double x) {
  const double h = g.spacing(axis);
  const std::size_t n = g.points(axis);
  double s = (x - g.origin(axis)) / h;
  AxisWeights w;
  if (g.periodic(axis)) {
    s = std::fmod(s, static_cast<double>(n));
    if (s < 0.0) s += static_cast<double>(n);
    auto i0 = static_cast<std::size_t>(std::floor(s));
    if (i0 >= n) i0 = 0;
    w.lo = i0;
    w.hi = (i0 + 1) % n;
    w.t = s - std::floor(s);
    return w;
  }
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  auto i0 = std::min(static_cast<std::size_t>(std::floor(s)), n - 2);
  w.lo = i0;
  w.hi = i0 + 1;
  w.t = s - static_cast<double>(i0);
  return w;
}

template <class Sample>
double multilinear(const Grid& g, const Point& x, Sample&& f) {
  const AxisWeights wx = locate(g, 0, x[0]);
  if (g.dims() == 1) return (1.0 - wx.t) * f(wx.lo) + wx.t * f(wx.hi);
  const AxisWeights wy = locate(g, 1, x[1]);
  const double f00 = f(g.index(wx.lo, wy.lo));
  const double f10 = f(g.index(wx.hi, wy.lo));
  const double f01 = f(g.index(wx.lo, wy.hi));
  const double f11 = f(g.index(wx.hi, wy.hi));
  return (1.0 - wy.t) * ((1.0 - wx.t) * f00 + wx.t * f10) +
         wy.t * ((1.0 - wx.t) * f01 + wx.t * f11);
}

}  // namespace

VectorField gradient(const ScalarField& f) {
  require_finite(f, "gradient input");
  const Grid& g = f.grid();
  VectorField out(g);
  auto sample = [&](std::size_t i) { return f[i]; };
  for (std::size_t a = 0; a < g.dims(); ++a) {
    for (std::size_t i = 0; i < g.size(); ++i) out.at(a, i) = axis_derivative(g, i, a, sample);
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  require_finite(v, "divergence input");
  const Grid& g = v.grid();
  ScalarField out(g);
  for (std::size_t a = 0; a < g.dims(); ++a) {
    auto sample = [&](std::size_t i) { return v.at(a, i); };
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += axis_derivative(g, i, a, sample);
  }
  return out;
}

double integrate(const ScalarField& f) {
  require_finite(f, "integrand");
  double sum = 0.0;
  for (double x : f.values()) sum += x;
  return sum * f.grid().cell_volume();
}

VectorField link_difference(const ScalarField& f, bool angle) {
  require_finite(f, "link difference input");
  const Grid& g = f.grid();
  VectorField out(g);
  for (std::size_t a = 0; a < g.dims(); ++a) {
    const double h = g.spacing(a);
    const std::size_t n = g.points(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g.periodic(a) && g.unravel(i)[a] + 1 == n) continue;
      double d = f[g.shifted(i, a, 1)] - f[i];
      if (angle) d = principal(d);
      out.at(a, i) = d / h;
    }
  }
  return out;
}

VectorField links_to_nodes(const VectorField& links) {
  const Grid& g = links.grid();
  VectorField out(g);
  for (std::size_t a = 0; a < g.dims(); ++a) {
    const std::size_t n = g.points(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t k = g.unravel(i)[a];
      double value;
      if (g.periodic(a) || (k > 0 && k + 1 < n)) {
        value = 0.5 * (links.at(a, i) + links.at(a, g.shifted(i, a, -1)));
      } else if (k == 0) {
        value = 1.5 * links.at(a, i) - 0.5 * links.at(a, g.shifted(i, a, 1));
      } else {
        value = 1.5 * links.at(a, g.shifted(i, a, -1)) - 0.5 * links.at(a, g.shifted(i, a, -2));
      }
      out.at(a, i) = value;
    }
  }
  return out;
}

double interpolate(const ScalarField& f, const Point& x) {
  return multilinear(f.grid(), x, [&](std::size_t i) { return f[i]; });
}

Point interpolate(const VectorField& v, const Point& x) {
  Point out{0.0, 0.0};
  for (std::size_t a = 0; a < v.dims(); ++a) {
    out[a] = multilinear(v.grid(), x, [&](std::size_t i) { return v.at(a, i); });
  }
  return out;
}

void require_finite(const ScalarField& f, const char* what) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      fail(ErrorCode::numerical,
           std::string(what) + ": non-finite value at grid index " + std::to_string(i));
    }
  }
}

void require_finite(const VectorField& v, const char* what) {
  for (std::size_t a = 0; a < v.dims(); ++a) {
    for (std::size_t i = 0; i < v.points(); ++i) {
      if (!std::isfinite(v.at(a, i))) {
        fail(ErrorCode::numerical, std::string(what) + ": non-finite component " +
                                       std::to_string(a) + " at grid index " + std::to_string(i));
      }
    }
  }
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) fail(ErrorCode::invalid_argument, std::string(what) + ": fields live on different grids");
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double max_value(const ScalarField& f) {
  double m = -INFINITY;
  for (double x : f.values()) m = std::max(m, x);
  return m;
}

}  // namespace edlab
