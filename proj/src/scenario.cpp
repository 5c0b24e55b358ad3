#include "edlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "edlab/error.hpp"
#include "edlab/field_io.hpp"
#include "edlab/gauge.hpp"
#include "edlab/hydro.hpp"
#include "edlab/ops.hpp"
#include "edlab/schrodinger.hpp"

namespace edlab {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNormalizationTolerance = 1e-6;
constexpr double kBoundaryWarning = 1e-8;

// Solver requirements of each criterion kind; `lower` marks kinds whose
// threshold is a lower bound.
struct KindInfo {
  const char* name;
  bool needs_walkers;
  bool needs_fields;
  bool needs_schrodinger;
  bool lower;
};

constexpr KindInfo kKinds[] = {
    {"walkers_vs_fields_l1", true, true, false, false},
    {"fields_vs_schrodinger_l1", false, true, true, false},
    {"walkers_vs_schrodinger_l1", true, false, true, false},
    {"width_law", false, true, false, false},
    {"hamiltonian_drift", false, true, false, false},
    {"norm_drift", false, true, false, false},
    {"norm_drift_psi", false, false, true, false},
    {"hamiltonian_value", false, false, false, false},
    {"stationarity", false, true, false, false},
    {"walker_stationarity_ks", true, false, false, true},
    {"circulation", false, false, false, false},
    {"winding", false, false, false, false},
    {"quantization", false, false, false, false},
    {"closure_jump", false, false, false, false},
    {"linearity", false, false, false, false},
    {"gauge_invariance_rho", false, false, false, false},
    {"gauge_invariance_velocity", false, false, false, false},
    {"gauge_invariance_hamiltonian", false, false, false, false},
    {"charge", false, false, false, false},
    {"rescale_invariance", false, false, false, false},
    {"classical_limit", false, true, false, false},
};

const KindInfo* find_kind(const std::string& name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

// Collects issues while walking the config so every problem is reported in
// one pass.
class Reader {
 public:
  std::vector<ValidationIssue> errors;
  std::vector<std::string> warnings;

  void error(const std::string& path, const std::string& message) { errors.push_back({path, message}); }

  const json* child(const json& obj, const std::string& key) const {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  double number(const json& obj, const std::string& key, const std::string& path, double fallback,
                bool required = false) {
    const json* v = child(obj, key);
    if (!v) {
      if (required) error(join(path, key), "missing required number");
      return fallback;
    }
    if (!v->is_number()) {
      error(join(path, key), "expected a number");
      return fallback;
    }
    return v->get<double>();
  }

  std::string text(const json& obj, const std::string& key, const std::string& path,
                   const std::string& fallback, bool required = false) {
    const json* v = child(obj, key);
    if (!v) {
      if (required) error(join(path, key), "missing required string");
      return fallback;
    }
    if (!v->is_string()) {
      error(join(path, key), "expected a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  // Accepts a number (broadcast to `n` entries) or an array of `n` numbers.
  std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path,
                              std::size_t n, std::vector<double> fallback, bool required = false) {
    const json* v = child(obj, key);
    if (!v) {
      if (required) error(join(path, key), "missing required value");
      if (fallback.size() == 1 && n > 1) fallback.assign(n, fallback[0]);
      return fallback;
    }
    if (v->is_number()) return std::vector<double>(n, v->get<double>());
    if (!v->is_array() || (n != 0 && v->size() != n)) {
      error(join(path, key), n == 0 ? "expected an array of numbers"
                                    : "expected a number or an array of " + std::to_string(n) + " numbers");
      return fallback.size() == n ? fallback : std::vector<double>(n, fallback.empty() ? 0.0 : fallback[0]);
    }
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) {
        error(join(path, key), "expected numbers");
        return std::vector<double>(v->size(), 0.0);
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const json& obj, const std::string& key, const std::string& path, std::size_t n) {
    std::vector<double> raw = numbers(obj, key, path, n, {0.0});
    std::vector<int> out;
    for (double r : raw) {
      if (r != std::round(r)) {
        error(join(path, key), "expected integers");
        return std::vector<int>(n, 0);
      }
      out.push_back(static_cast<int>(r));
    }
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

// Displacement from `c` along `axis`, minimal image on periodic axes.
double offset(const Grid& grid, std::size_t axis, double x, double c) {
  double d = x - c;
  if (grid.periodic(axis)) {
    const double L = grid.extent(axis);
    d -= L * std::round(d / L);
  }
  return d;
}

std::optional<Grid> read_grid(Reader& r, const json& cfg) {
  const json* g = r.child(cfg, "grid");
  if (!g || !g->is_object()) {
    r.error("grid", "missing grid object");
    return std::nullopt;
  }
  const std::string topo = r.text(*g, "topology", "grid", "", true);
  if (topo.empty()) return std::nullopt;
  try {
    const Topology t = topology_from_string(topo);
    const std::size_t dims = (t == Topology::line || t == Topology::ring) ? 1 : 2;
    const auto pts = r.numbers(*g, "points", "grid", dims, {}, true);
    const auto ext = r.numbers(*g, "extent", "grid", dims, {}, true);
    const auto org = r.numbers(*g, "origin", "grid", dims, {0.0});
    if (pts.size() != dims || ext.size() != dims) return std::nullopt;
    std::vector<std::size_t> points;
    for (double p : pts) {
      if (p < 0 || p != std::round(p)) {
        r.error("grid.points", "expected non-negative integers");
        return std::nullopt;
      }
      points.push_back(static_cast<std::size_t>(p));
    }
    return Grid(t, points, ext, org);
  } catch (const Error& e) {
    r.error("grid", e.what());
    return std::nullopt;
  }
}

std::optional<ModelParams> read_params(Reader& r, const json& cfg, const Grid& grid, double& safety,
                                       bool& dt_given) {
  ModelParams p;
  const json empty = json::object();
  const json* node = r.child(cfg, "params");
  const json& pj = node ? *node : empty;
  p.eta = r.number(pj, "eta", "params", 1.0);
  if (r.child(pj, "hbar") && r.child(pj, "xi")) r.error("params", "give either hbar or xi, not both");
  if (r.child(pj, "hbar")) {
    const double hbar = r.number(pj, "hbar", "params", 1.0);
    p.xi = hbar * hbar / 8.0;
    if (hbar < 0) r.error("params.hbar", "must be non-negative");
  } else {
    p.xi = r.number(pj, "xi", "params", 0.125);
  }
  p.masses = r.numbers(pj, "masses", "params", 0, {1.0});
  p.betas = r.numbers(pj, "betas", "params", 0, std::vector<double>(p.masses.size(), 0.0));
  p.c = r.number(pj, "c", "params", 1.0);
  dt_given = r.child(pj, "dt") != nullptr;
  p.dt = r.number(pj, "dt", "params", 1e-3);
  safety = r.number(pj, "dt_safety", "params", kDefaultSafety);
  if (safety <= 0.0 || safety > 1.0) r.error("params.dt_safety", "must lie in (0, 1]");
  const auto ap = r.numbers(pj, "axis_particle", "params", grid.dims(), {0.0});
  p.axis_particle.clear();
  for (double a : ap) p.axis_particle.push_back(a < 0 ? 0 : static_cast<std::size_t>(a));
  try {
    p.validate(grid.dims());
  } catch (const Error& e) {
    r.error("params", e.what());
    return std::nullopt;
  }
  return p;
}

std::optional<ScalarField> read_rho(Reader& r, const json& spec, const Grid& grid, const ModelParams& p) {
  const std::string path = "initial.rho";
  const std::string type = r.text(spec, "type", path, "", true);
  ScalarField rho(grid, 1.0);
  const std::size_t d = grid.dims();
  if (type == "gaussian" || type == "harmonic-ground") {
    std::vector<double> sigma;
    if (type == "gaussian") {
      sigma = r.numbers(spec, "sigma", path, d, {1.0});
    } else {
      const auto omega = r.numbers(spec, "omega", path, d, {1.0});
      for (std::size_t a = 0; a < d; ++a) {
        if (omega[a] <= 0.0 || p.hbar() == 0.0) {
          r.error(path + ".omega", "needs omega > 0 and hbar > 0");
          return std::nullopt;
        }
        sigma.push_back(std::sqrt(p.hbar() / (2.0 * p.mass_of_axis(a) * omega[a])));
      }
    }
    const auto center = r.numbers(spec, "center", path, d, {0.0});
    for (double s : sigma) {
      if (!(s > 0.0)) {
        r.error(path + ".sigma", "must be positive");
        return std::nullopt;
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point x = grid.position(i);
      double e = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double z = offset(grid, a, x[a], center[a]) / sigma[a];
        e += 0.5 * z * z;
      }
      rho[i] = std::exp(-e);
    }
  } else if (type == "uniform") {
  } else if (type == "cosine") {
    const double amp = r.number(spec, "amplitude", path, 0.5);
    const auto mode = r.integers(spec, "mode", path, d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point x = grid.position(i);
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        if (mode[a] != 0) s += std::cos(kTwoPi * mode[a] * (x[a] - grid.origin(a)) / grid.extent(a));
      }
      rho[i] = 1.0 + amp * s;
    }
  } else if (type == "samples") {
    const auto values = r.numbers(spec, "values", path, grid.size(), {0.0}, true);
    if (values.size() != grid.size()) return std::nullopt;
    rho = ScalarField(grid, values);
  } else {
    if (!type.empty()) r.error(path + ".type", "unknown density initializer '" + type + "'");
    return std::nullopt;
  }
  const bool normalize = !r.child(spec, "normalize") || spec.at("normalize").get<bool>();
  if (normalize) {
    const double target = r.number(spec, "mass", path, 1.0);
    const double total = integrate(rho);
    if (!(total > 0.0)) {
      r.error(path, "density has no positive mass");
      return std::nullopt;
    }
    for (double& v : rho.values()) v *= target / total;
  }
  return rho;
}

std::optional<ScalarField> angle_field(Reader& r, const json& spec, const std::string& path, const Grid& grid,
                                       std::vector<int>& windings) {
  const std::string type = r.text(spec, "type", path, "zero");
  ScalarField phi(grid);
  windings.assign(grid.dims(), 0);
  if (type == "zero") return phi;
  if (type == "winding") {
    windings = r.integers(spec, "windings", path, grid.dims());
    for (std::size_t a = 0; a < grid.dims(); ++a) {
      if (windings[a] != 0 && !grid.periodic(a)) {
        r.error(path + ".windings", "windings need a periodic axis");
        return std::nullopt;
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point x = grid.position(i);
      double v = 0.0;
      for (std::size_t a = 0; a < grid.dims(); ++a) {
        v += kTwoPi * windings[a] * (x[a] - grid.origin(a)) / grid.extent(a);
      }
      phi[i] = std::remainder(v, kTwoPi);
    }
    return phi;
  }
  if (type == "samples") {
    const auto values = r.numbers(spec, "values", path, grid.size(), {0.0}, true);
    if (values.size() != grid.size()) return std::nullopt;
    windings.assign(grid.dims(), 0);
    return ScalarField(grid, values);
  }
  r.error(path + ".type", "unknown angle initializer '" + type + "'");
  return std::nullopt;
}

std::optional<VectorField> read_connection(Reader& r, const json& spec, const Grid& grid) {
  const std::string path = "gauge.A";
  const std::string type = r.text(spec, "type", path, "zero");
  VectorField A(grid);
  if (type == "zero") return A;
  if (type == "constant-A") {
    const auto value = r.numbers(spec, "value", path, grid.dims(), {0.0}, true);
    for (std::size_t a = 0; a < grid.dims(); ++a) {
      for (std::size_t i = 0; i < grid.size(); ++i) A.at(a, i) = value[a];
    }
    return A;
  }
  if (type == "samples") {
    const auto values = r.numbers(spec, "values", path, grid.size() * grid.dims(), {0.0}, true);
    if (values.size() != grid.size() * grid.dims()) return std::nullopt;
    std::copy(values.begin(), values.end(), A.values().begin());
    return A;
  }
  r.error(path + ".type", "unknown connection initializer '" + type + "'");
  return std::nullopt;
}

std::optional<ScalarField> read_potential(Reader& r, const json& cfg, const Grid& grid, const ModelParams& p) {
  ScalarField V(grid);
  const json* spec = r.child(cfg, "potential");
  if (!spec) return V;
  const std::string path = "potential";
  const std::string type = r.text(*spec, "type", path, "zero");
  if (type == "zero") return V;
  if (type == "harmonic-potential") {
    const auto omega = r.numbers(*spec, "omega", path, grid.dims(), {1.0});
    const auto center = r.numbers(*spec, "center", path, grid.dims(), {0.0});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point x = grid.position(i);
      double v = 0.0;
      for (std::size_t a = 0; a < grid.dims(); ++a) {
        const double z = offset(grid, a, x[a], center[a]);
        v += 0.5 * p.mass_of_axis(a) * omega[a] * omega[a] * z * z;
      }
      V[i] = v;
    }
    return V;
  }
  if (type == "samples") {
    const auto values = r.numbers(*spec, "values", path, grid.size(), {0.0}, true);
    if (values.size() != grid.size()) return std::nullopt;
    return ScalarField(grid, values);
  }
  r.error(path + ".type", "unknown potential initializer '" + type + "'");
  return std::nullopt;
}

std::optional<PhaseRecord> read_phase(Reader& r, const json& spec, const Grid& grid, const ModelParams& p,
                                      const std::vector<int>& gauge_windings) {
  const std::string path = "initial.phase";
  const std::string type = r.text(spec, "type", path, "zero");
  const std::size_t d = grid.dims();
  if (type == "zero") return PhaseRecord(ScalarField(grid));
  if (type == "plane-wave-winding") {
    const auto windings = r.integers(spec, "windings", path, d);
    const double quantum = r.number(spec, "quantum", path, p.hbar());
    const auto momentum = r.numbers(spec, "momentum", path, d, {0.0});
    ScalarField base(grid);
    for (std::size_t a = 0; a < d; ++a) {
      if (windings[a] != 0 && !grid.periodic(a)) {
        r.error(path + ".windings", "windings need a periodic axis");
        return std::nullopt;
      }
      if (momentum[a] != 0.0 && grid.periodic(a)) {
        r.error(path + ".momentum", "use windings on periodic axes");
        return std::nullopt;
      }
    }
    if (quantum == 0.0 && std::any_of(windings.begin(), windings.end(), [](int w) { return w != 0; })) {
      r.error(path + ".quantum", "windings need a non-zero loop quantum");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point x = grid.position(i);
      double v = 0.0;
      for (std::size_t a = 0; a < d; ++a) v += momentum[a] * x[a];
      base[i] = v;
    }
    if (p.hbar() > 0.0 && std::abs(quantum / p.hbar() - std::round(quantum / p.hbar())) > kQuantizationTolerance) {
      r.warnings.push_back("initial phase loop quantum " + fmt(quantum) +
                           " is not a multiple of hbar; psi is not single-valued");
    }
    return PhaseRecord(std::move(base), windings, std::vector<double>(d, quantum));
  }
  if (type == "gauge-winding") {
    std::vector<double> quanta;
    for (std::size_t a = 0; a < d; ++a) quanta.push_back(p.coupling_of_axis(a));
    std::vector<int> w = gauge_windings;
    w.resize(d, 0);
    for (std::size_t a = 0; a < d; ++a) {
      if (quanta[a] == 0.0) w[a] = 0;
    }
    return PhaseRecord(ScalarField(grid), w, quanta);
  }
  if (type == "samples") {
    const auto values = r.numbers(spec, "values", path, grid.size(), {0.0}, true);
    if (values.size() != grid.size()) return std::nullopt;
    const auto windings = r.integers(spec, "windings", path, d);
    const double quantum = r.number(spec, "quantum", path, p.hbar());
    try {
      return PhaseRecord(ScalarField(grid, values), windings, std::vector<double>(d, quantum));
    } catch (const Error& e) {
      r.error(path, e.what());
      return std::nullopt;
    }
  }
  r.error(path + ".type", "unknown phase initializer '" + type + "'");
  return std::nullopt;
}

}  // namespace

Solvers Solvers::parse(const std::string& comma_list) {
  Solvers s;
  std::stringstream in(comma_list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "walkers") {
      s.walkers = true;
    } else if (item == "fields") {
      s.fields = true;
    } else if (item == "schrodinger") {
      s.schrodinger = true;
    } else if (!item.empty()) {
      fail(ErrorCode::invalid_argument, "unknown solver '" + item + "'");
    }
  }
  return s;
}

std::vector<std::string> Solvers::names() const {
  std::vector<std::string> out;
  if (walkers) out.emplace_back("walkers");
  if (fields) out.emplace_back("fields");
  if (schrodinger) out.emplace_back("schrodinger");
  return out;
}

json ValidationResult::to_json() const {
  json out;
  out["valid"] = ok();
  out["errors"] = json::array();
  for (const auto& e : errors) out["errors"].push_back({{"path", e.path}, {"message", e.message}});
  out["warnings"] = warnings;
  if (scenario) {
    out["scenario"] = scenario->name;
    out["dt"] = scenario->params.dt;
    out["steps"] = scenario->steps;
    out["horizon"] = scenario->horizon;
  }
  return out;
}

ScalarField random_smooth_chi(const Grid& grid, const RandomChi& spec, std::uint64_t draw) {
  Rng rng = make_stream(spec.seed, 0xC0FFEE0000000000ULL ^ draw);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> shift(0.0, kTwoPi);
  ScalarField chi(grid);
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    const double span = grid.periodic(a) ? grid.extent(a) : 2.0 * grid.extent(a);
    for (std::size_t k = 1; k <= spec.modes; ++k) {
      const double c = spec.amplitude * amp(rng) / static_cast<double>(k);
      const double s = shift(rng);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.position(i)[a] - grid.origin(a);
        chi[i] += c * std::cos(kTwoPi * static_cast<double>(k) * x / span + s);
      }
    }
  }
  return chi;
}

ValidationResult validate_scenario(const json& raw) {
  Reader r;
  ValidationResult result;
  if (!raw.is_object()) {
    result.errors.push_back({"", "config must be a JSON object"});
    return result;
  }
  const json* schema = r.child(raw, "schema");
  if (!schema || !schema->is_number_integer() || schema->get<int>() != kScenarioSchema) {
    r.error("schema", "expected schema " + std::to_string(kScenarioSchema));
  }
  const std::string name = r.text(raw, "name", "", "unnamed");

  // Without a grid or parameters nothing else can be built; still report
  // criteria that could never be valid.
  auto bail = [&]() {
    if (const json* cs = r.child(raw, "criteria"); cs && cs->is_array()) {
      for (std::size_t k = 0; k < cs->size(); ++k) {
        const json& c = (*cs)[k];
        if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string()) continue;
        const std::string kind = c["kind"].get<std::string>();
        if (!find_kind(kind)) r.error("criteria[" + std::to_string(k) + "].kind", "unknown criterion '" + kind + "'");
      }
    }
    result.errors = std::move(r.errors);
    return result;
  };
  auto grid = read_grid(r, raw);
  if (!grid) return bail();
  double safety = kDefaultSafety;
  bool dt_given = false;
  auto params = read_params(r, raw, *grid, safety, dt_given);
  if (!params) return bail();
  const ModelParams& p = *params;

  // Run block.
  const json empty = json::object();
  const json* run_node = r.child(raw, "run");
  const json& run = run_node ? *run_node : empty;
  Solvers solvers;
  if (const json* s = r.child(run, "solvers")) {
    if (!s->is_array()) {
      r.error("run.solvers", "expected an array of solver names");
    } else {
      for (const auto& e : *s) {
        const std::string n = e.is_string() ? e.get<std::string>() : "";
        if (n == "walkers") {
          solvers.walkers = true;
        } else if (n == "fields") {
          solvers.fields = true;
        } else if (n == "schrodinger") {
          solvers.schrodinger = true;
        } else {
          r.error("run.solvers", "unknown solver '" + n + "'");
        }
      }
    }
  }
  const bool any_solver = solvers.walkers || solvers.fields || solvers.schrodinger;
  const bool hydro = solvers.fields || solvers.walkers;

  // Time step.
  double dt = p.dt;
  if (p.hbar() > 0.0) {
    const double bound = stability_bound(*grid, p);
    if (dt_given) {
      if (hydro && dt > bound) {
        r.error("params.dt", "dt = " + fmt(dt) + " exceeds the stability bound C*h^2*m/hbar = " + fmt(bound) +
                                 " (C = " + fmt(kStabilityConstant) + ")");
      }
    } else {
      dt = safety * bound;
    }
  } else if (!dt_given && any_solver) {
    r.error("params.dt", "dt is required when hbar = 0 (no dispersive stability bound)");
  }
  if (!(dt > 0.0)) r.error("params.dt", "must be positive");

  double horizon = 0.0;
  std::size_t steps = 0;
  const bool has_h = r.child(run, "horizon") != nullptr;
  const bool has_s = r.child(run, "steps") != nullptr;
  if (has_h && has_s) r.error("run", "give either horizon or steps, not both");
  if (has_s) {
    const double s = r.number(run, "steps", "run", 0.0);
    if (s < 0 || s != std::round(s)) r.error("run.steps", "expected a non-negative integer");
    steps = static_cast<std::size_t>(std::max(0.0, s));
    horizon = static_cast<double>(steps) * dt;
  } else if (has_h) {
    horizon = r.number(run, "horizon", "run", 0.0);
    if (horizon < 0.0) r.error("run.horizon", "must be non-negative");
    if (dt > 0.0 && horizon > 0.0) {
      steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
      dt = horizon / static_cast<double>(steps);
    }
  }
  if (any_solver && steps == 0) r.error("run", "solvers requested but the run has no steps");

  const double snap = r.number(run, "snapshot_every", "run", 0.0);
  const double walkers = r.number(run, "walkers", "run", 0.0);
  const double seed = r.number(run, "seed", "run", 0.0);
  const double draws = r.number(run, "gauge_draws", "run", 0.0);
  if (snap < 0 || walkers < 0 || seed < 0 || draws < 0) r.error("run", "counts and seed must be non-negative");
  if (solvers.walkers && walkers < 1) r.error("run.walkers", "the walker solver needs at least one walker");
  if (solvers.schrodinger && p.hbar() == 0.0) r.error("run.solvers", "the Schroedinger solver needs hbar > 0");

  // Gauge.
  std::optional<GaugeInput> gauge;
  std::optional<RandomChi> chi;
  std::vector<int> gauge_windings(grid->dims(), 0);
  if (const json* g = r.child(raw, "gauge")) {
    GaugeInput in = GaugeInput::zero(*grid);
    bool ok = true;
    if (const json* phi = r.child(*g, "phi")) {
      auto f = angle_field(r, *phi, "gauge.phi", *grid, gauge_windings);
      if (f) {
        in.phi = std::move(*f);
      } else {
        ok = false;
      }
    }
    if (const json* A = r.child(*g, "A")) {
      auto f = read_connection(r, *A, *grid);
      if (f) {
        in.A = std::move(*f);
      } else {
        ok = false;
      }
    }
    if (const json* c = r.child(*g, "chi")) {
      const std::string type = r.text(*c, "type", "gauge.chi", "random-smooth");
      if (type != "random-smooth") {
        r.error("gauge.chi.type", "unknown gauge function initializer '" + type + "'");
      } else {
        RandomChi spec;
        spec.modes = static_cast<std::size_t>(std::max(1.0, r.number(*c, "modes", "gauge.chi", 3.0)));
        spec.amplitude = r.number(*c, "amplitude", "gauge.chi", 1.0);
        spec.seed = static_cast<std::uint64_t>(std::max(0.0, r.number(*c, "seed", "gauge.chi", 7.0)));
        chi = spec;
      }
    }
    if (ok) gauge = std::move(in);
  }
  if (draws > 0 && !chi) r.error("run.gauge_draws", "gauge draws need a gauge.chi specification");
  if (draws > 0 || chi) {
    try {
      uniform_coupling(p);
    } catch (const Error& e) {
      r.error("params.betas", e.what());
    }
  }

  // Initial state.
  std::optional<ScalarField> rho;
  std::optional<PhaseRecord> phase;
  std::optional<double> sigma;
  const json* init = r.child(raw, "initial");
  if (!init || !init->is_object()) {
    r.error("initial", "missing initial state");
  } else if (const json* psi = r.child(*init, "psi")) {
    if (r.child(*init, "rho") || r.child(*init, "phase")) r.error("initial", "give either psi or rho/phase");
    const auto re = r.numbers(*psi, "re", "initial.psi", grid->size(), {0.0}, true);
    const auto im = r.numbers(*psi, "im", "initial.psi", grid->size(), {0.0}, true);
    if (re.size() == grid->size() && im.size() == grid->size()) {
      ComplexField f(*grid);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = {re[i], im[i]};
      try {
        auto m = madelung_decompose(f, p);
        rho = std::move(m.rho);
        phase = std::move(m.phase);
      } catch (const Error& e) {
        r.error("initial.psi", e.what());
      }
    }
  } else {
    const json* rs = r.child(*init, "rho");
    if (!rs) {
      r.error("initial.rho", "missing density initializer");
    } else {
      rho = read_rho(r, *rs, *grid, p);
      const std::string type = rs->value("type", "");
      if (type == "gaussian") {
        sigma = r.numbers(*rs, "sigma", "initial.rho", grid->dims(), {1.0})[0];
      } else if (type == "harmonic-ground" && p.hbar() > 0.0) {
        const double omega = r.numbers(*rs, "omega", "initial.rho", grid->dims(), {1.0})[0];
        sigma = std::sqrt(p.hbar() / (2.0 * p.mass_of_axis(0) * omega));
      }
    }
    const json* ps = r.child(*init, "phase");
    phase = read_phase(r, ps ? *ps : empty, *grid, p, gauge_windings);
  }
  auto V = read_potential(r, raw, *grid, p);

  if (rho) {
    bool negative = false;
    bool finite = true;
    for (double v : rho->values()) {
      negative = negative || v < 0.0;
      finite = finite && std::isfinite(v);
    }
    if (negative) r.error("initial.rho", "density must be non-negative");
    if (!finite) r.error("initial.rho", "density must be finite");
    const double total = integrate(*rho);
    if (finite && std::abs(total - 1.0) > kNormalizationTolerance) {
      r.error("initial.rho", "density integrates to " + fmt(total) + ", expected 1 within " +
                                 fmt(kNormalizationTolerance));
    }
    const double peak = max_value(*rho);
    for (std::size_t a = 0; a < grid->dims(); ++a) {
      if (grid->periodic(a)) continue;
      double edge = 0.0;
      for (std::size_t i = 0; i < grid->size(); ++i) {
        const auto ij = grid->unravel(i);
        if (ij[a] == 0 || ij[a] + 1 == grid->points(a)) edge = std::max(edge, (*rho)[i]);
      }
      if (edge > kBoundaryWarning * peak) {
        r.warnings.push_back("density at the open boundary of axis " + std::to_string(a) + " is " +
                             fmt(edge / peak) + " of its peak; boundary effects may matter");
      }
    }
    const std::size_t low = count_below_floor(*rho);
    if (hydro && low > 0) {
      r.warnings.push_back(std::to_string(low) +
                           " cells start below the density floor; the field equations may lose stability there");
    }
  }
  if (p.hbar() > 0.0) {
    for (const auto& v : quantization_check(p)) {
      if (!v.pass) {
        r.warnings.push_back("eta*beta/hbar = " + fmt(v.ratio) + " for particle " + std::to_string(v.particle) +
                             " is not an integer; charge is not quantized");
      }
    }
  }

  // Superposition witness.
  std::optional<Superposition> sup;
  if (const json* s = r.child(raw, "superposition")) {
    Superposition w;
    w.winding = static_cast<int>(r.number(*s, "winding", "superposition", 1.0));
    if (p.hbar() == 0.0) {
      r.error("superposition", "needs hbar > 0");
    } else if (!grid->periodic(0)) {
      r.error("superposition", "needs a periodic axis 0");
    } else {
      w.ratio = p.coupling_of_axis(0) / p.hbar();
      sup = w;
    }
  }

  // Criteria.
  std::vector<Criterion> criteria;
  if (const json* cs = r.child(raw, "criteria")) {
    if (!cs->is_array()) {
      r.error("criteria", "expected an array");
    } else {
      std::set<std::string> seen;
      for (std::size_t k = 0; k < cs->size(); ++k) {
        const std::string path = "criteria[" + std::to_string(k) + "]";
        const json& c = (*cs)[k];
        Criterion cr;
        cr.kind = r.text(c, "kind", path, "", true);
        cr.threshold = r.number(c, "threshold", path, 0.0, true);
        cr.target = r.number(c, "target", path, 0.0);
        const KindInfo* info = find_kind(cr.kind);
        if (!info) {
          if (!cr.kind.empty()) r.error(path + ".kind", "unknown criterion '" + cr.kind + "'");
          continue;
        }
        if (!seen.insert(cr.kind).second) r.error(path + ".kind", "criterion '" + cr.kind + "' listed twice");
        if ((info->needs_walkers && !solvers.walkers) || (info->needs_fields && !hydro) ||
            (info->needs_schrodinger && !solvers.schrodinger)) {
          r.error(path + ".kind", "criterion '" + cr.kind + "' needs a solver the run does not request");
        }
        if (cr.kind == "walkers_vs_fields_l1" && !solvers.fields) {
          r.error(path + ".kind", "criterion '" + cr.kind + "' needs the fields solver");
        }
        if (cr.kind == "width_law" && !sigma) r.error(path, "width_law needs a gaussian initial density");
        if (cr.kind == "closure_jump" && !sup) r.error(path, "closure_jump needs a superposition block");
        if (cr.kind.rfind("gauge_invariance", 0) == 0 && (draws < 1 || !chi)) {
          r.error(path, cr.kind + " needs run.gauge_draws > 0 and gauge.chi");
        }
        if ((cr.kind == "quantization" || cr.kind == "linearity" || cr.kind == "winding" ||
             cr.kind == "circulation") && p.hbar() == 0.0) {
          r.error(path, cr.kind + " needs hbar > 0");
        }
        if ((cr.kind == "circulation" || cr.kind == "winding") && !grid->periodic(0)) {
          r.error(path, cr.kind + " needs a periodic axis 0");
        }
        if (cr.kind == "rescale_invariance" && cr.target == 0.0) {
          r.error(path + ".target", "rescale factor must be non-zero");
        }
        criteria.push_back(cr);
      }
    }
  }

  result.warnings = std::move(r.warnings);
  if (!r.errors.empty() || !rho || !phase || !V) {
    result.errors = std::move(r.errors);
    if (result.errors.empty()) result.errors.push_back({"", "scenario could not be constructed"});
    return result;
  }
  ModelParams final_params = p;
  final_params.dt = dt;
  Scenario sc{name,
              raw,
              *grid,
              final_params,
              std::move(*rho),
              std::move(*phase),
              std::move(*V),
              std::move(gauge),
              chi,
              horizon,
              steps,
              static_cast<std::size_t>(snap),
              static_cast<std::size_t>(walkers),
              static_cast<std::uint64_t>(seed),
              solvers,
              static_cast<std::size_t>(draws),
              sup,
              sigma,
              std::move(criteria),
              result.warnings};
  result.scenario = std::move(sc);
  return result;
}

Scenario load_scenario(const json& raw) {
  auto v = validate_scenario(raw);
  if (!v.ok()) {
    std::string msg = "invalid scenario:";
    for (const auto& e : v.errors) msg += "\n  " + (e.path.empty() ? std::string("(root)") : e.path) + ": " + e.message;
    fail(ErrorCode::validation, msg);
  }
  return std::move(*v.scenario);
}

// Presets.

namespace {

json criterion(const std::string& kind, double threshold, std::optional<double> target = std::nullopt) {
  json c{{"kind", kind}, {"threshold", threshold}};
  if (target) c["target"] = *target;
  return c;
}

json ring_grid(std::size_t n = 256) {
  return {{"topology", "ring"}, {"points", {n}}, {"extent", {kTwoPi}}, {"origin", {0.0}}};
}

json base_config(const std::string& name) {
  return {{"schema", kScenarioSchema},
          {"name", name},
          {"params", {{"eta", 1.0}, {"xi", 0.125}, {"masses", {1.0}}, {"betas", {0.0}}, {"c", 1.0}}}};
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::invalid_argument, "override " + key + " expects a number, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  if (v != std::round(v)) fail(ErrorCode::invalid_argument, "override " + key + " expects an integer");
  return static_cast<int>(v);
}

json free_packet() {
  json c = base_config("free-packet");
  c["grid"] = {{"topology", "line"}, {"points", {256}}, {"extent", {14.0}}, {"origin", {-7.0}}};
  c["initial"] = {{"rho", {{"type", "gaussian"}, {"center", {0.0}}, {"sigma", {1.0}}}}, {"phase", {{"type", "zero"}}}};
  // t = 2 m sigma0^2 / hbar
  c["run"] = {{"horizon", 2.0},
              {"snapshot_every", 200},
              {"walkers", 100000},
              {"seed", 42},
              {"solvers", {"walkers", "fields", "schrodinger"}}};
  c["criteria"] = {criterion("walkers_vs_fields_l1", 0.05), criterion("fields_vs_schrodinger_l1", 1e-3),
                   criterion("width_law", 0.01), criterion("norm_drift_psi", 1e-10)};
  return c;
}

json harmonic_ground() {
  json c = base_config("harmonic-ground");
  c["grid"] = {{"topology", "line"}, {"points", {256}}, {"extent", {10.0}}, {"origin", {-5.0}}};
  c["potential"] = {{"type", "harmonic-potential"}, {"omega", {1.0}}, {"center", {0.0}}};
  c["initial"] = {{"rho", {{"type", "harmonic-ground"}, {"omega", {1.0}}, {"center", {0.0}}}},
                  {"phase", {{"type", "zero"}}}};
  c["run"] = {{"horizon", 1.0},
              {"snapshot_every", 200},
              {"walkers", 100000},
              {"seed", 42},
              {"solvers", {"walkers", "fields", "schrodinger"}}};
  c["criteria"] = {criterion("hamiltonian_value", 1e-4, 0.5), criterion("stationarity", 1e-8),
                   criterion("walker_stationarity_ks", 0.01), criterion("fields_vs_schrodinger_l1", 1e-3),
                   criterion("walkers_vs_fields_l1", 0.05), criterion("hamiltonian_drift", 1e-6),
                   criterion("norm_drift", 1e-8)};
  return c;
}

json ring_eigenstate(int m) {
  json c = base_config("ring-eigenstate");
  c["grid"] = ring_grid();
  c["initial"] = {{"rho", {{"type", "uniform"}}},
                  {"phase", {{"type", "plane-wave-winding"}, {"windings", {m}}}}};
  c["run"] = {{"steps", 200}, {"snapshot_every", 50}, {"seed", 42}, {"solvers", {"fields", "schrodinger"}}};
  // v = 2 pi m hbar / (L mass) with L = 2 pi
  const double energy = 0.5 * static_cast<double>(m) * static_cast<double>(m);
  c["criteria"] = {criterion("circulation", 1e-10, m),       criterion("winding", 0.0, m),
                   criterion("stationarity", 1e-12),          criterion("hamiltonian_value", 1e-10, energy),
                   criterion("hamiltonian_drift", 1e-6),      criterion("norm_drift", 1e-8),
                   criterion("fields_vs_schrodinger_l1", 1e-3)};
  return c;
}

json gauged_ring_flux(double flux, int m) {
  json c = base_config("gauged-ring-flux");
  c["grid"] = ring_grid();
  c["params"]["betas"] = {1.0};
  c["gauge"] = {{"phi", {{"type", "zero"}}}, {"A", {{"type", "constant-A"}, {"value", {flux}}}}};
  c["initial"] = {{"rho", {{"type", "cosine"}, {"amplitude", 0.3}, {"mode", {1}}}},
                  {"phase", {{"type", "plane-wave-winding"}, {"windings", {m}}}}};
  c["run"] = {{"steps", 1000},
              {"snapshot_every", 100},
              {"walkers", 100000},
              {"seed", 42},
              {"solvers", {"walkers", "fields", "schrodinger"}}};
  c["criteria"] = {criterion("hamiltonian_drift", 1e-6),       criterion("norm_drift", 1e-8),
                   criterion("norm_drift_psi", 1e-10),         criterion("fields_vs_schrodinger_l1", 1e-3),
                   criterion("walkers_vs_fields_l1", 0.05),    criterion("quantization", 0.0, 1.0),
                   criterion("circulation", 1e-10, m),         criterion("charge", 0.0),
                   criterion("rescale_invariance", 1e-12, 2.5)};
  return c;
}

json gauge_invariance_demo(int draws) {
  json c = base_config("gauge-invariance-demo");
  c["grid"] = ring_grid();
  c["params"]["betas"] = {1.0};
  c["gauge"] = {{"phi", {{"type", "winding"}, {"windings", {1}}}},
                {"A", {{"type", "constant-A"}, {"value", {0.4}}}},
                {"chi", {{"type", "random-smooth"}, {"modes", 3}, {"amplitude", 1.0}, {"seed", 7}}}};
  c["initial"] = {{"rho", {{"type", "cosine"}, {"amplitude", 0.5}, {"mode", {1}}}},
                  {"phase", {{"type", "plane-wave-winding"}, {"windings", {1}}}}};
  c["run"] = {{"steps", 200}, {"snapshot_every", 50}, {"seed", 42}, {"gauge_draws", draws}, {"solvers", {"fields"}}};
  c["criteria"] = {criterion("gauge_invariance_rho", 1e-8), criterion("gauge_invariance_velocity", 1e-10),
                   criterion("gauge_invariance_hamiltonian", 1e-10), criterion("hamiltonian_drift", 1e-6)};
  return c;
}

json wallstrom(double ratio) {
  json c = base_config("wallstrom-superposition");
  // An odd point count keeps theta = pi, where the integer-ratio witness
  // vanishes, off the transport path.
  c["grid"] = ring_grid(255);
  c["params"]["betas"] = {ratio};
  c["gauge"] = {{"phi", {{"type", "winding"}, {"windings", {1}}}}, {"A", {{"type", "zero"}}}};
  c["initial"] = {{"rho", {{"type", "uniform"}}}, {"phase", {{"type", "gauge-winding"}}}};
  c["superposition"] = {{"winding", 1}};
  c["run"] = {{"seed", 42}, {"solvers", json::array()}};
  const bool integer = std::abs(ratio - std::round(ratio)) <= kQuantizationTolerance;
  const double jump = integer ? 0.0 : 1.0 - std::cos(kTwoPi * ratio);
  c["criteria"] = {criterion("quantization", 0.0, integer ? 1.0 : 0.0),
                   criterion("closure_jump", integer ? 1e-10 : 1e-6, jump), criterion("linearity", 1e-10)};
  return c;
}

json classical_limit() {
  json c = base_config("classical-limit");
  c["grid"] = ring_grid();
  c["params"]["xi"] = 0.0;
  c["params"]["dt"] = 1e-3;
  c["initial"] = {{"rho", {{"type", "cosine"}, {"amplitude", 0.5}, {"mode", {1}}}},
                  {"phase", {{"type", "plane-wave-winding"}, {"windings", {1}}, {"quantum", 1.0}}}};
  c["run"] = {{"steps", 500},
              {"snapshot_every", 100},
              {"walkers", 100000},
              {"seed", 42},
              {"solvers", {"walkers", "fields"}}};
  c["criteria"] = {criterion("classical_limit", 0.0), criterion("hamiltonian_drift", 1e-6),
                   criterion("norm_drift", 1e-8), criterion("walkers_vs_fields_l1", 0.05)};
  return c;
}

std::vector<std::string> split_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorCode::invalid_argument, "override must be key=value: " + kv);
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"free-packet",           "harmonic-ground",         "ring-eigenstate", "gauged-ring-flux",
          "gauge-invariance-demo", "wallstrom-superposition", "classical-limit"};
}

void apply_override(json& config, const std::string& key, const std::string& value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &config;
  std::stringstream in(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(in, part, '.')) parts.push_back(part);
  if (parts.empty()) fail(ErrorCode::invalid_argument, "empty override key");
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    if (node->is_array()) {
      const std::size_t idx = static_cast<std::size_t>(parse_int(key, parts[k]));
      if (idx >= node->size()) fail(ErrorCode::invalid_argument, "override index out of range: " + key);
      node = &(*node)[idx];
    } else {
      if (!node->is_object() && !node->is_null()) fail(ErrorCode::invalid_argument, "override path is not an object: " + key);
      node = &(*node)[parts[k]];
    }
  }
  if (node->is_array()) {
    const std::size_t idx = static_cast<std::size_t>(parse_int(key, parts.back()));
    if (idx >= node->size()) fail(ErrorCode::invalid_argument, "override index out of range: " + key);
    (*node)[idx] = parsed;
  } else {
    if (!node->is_object() && !node->is_null()) fail(ErrorCode::invalid_argument, "override path is not an object: " + key);
    (*node)[parts.back()] = parsed;
  }
}

json preset_config(const std::string& name, const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> knobs;
  std::vector<std::pair<std::string, std::string>> paths;
  const std::set<std::string> knob_names{"winding", "ratio", "flux", "draws"};
  for (const auto& kv : overrides) {
    const auto p = split_override(kv);
    if (knob_names.count(p[0])) {
      knobs[p[0]] = p[1];
    } else {
      paths.emplace_back(p[0], p[1]);
    }
  }
  auto knob = [&](const std::string& k) -> std::optional<std::string> {
    auto it = knobs.find(k);
    if (it == knobs.end()) return std::nullopt;
    std::string v = it->second;
    knobs.erase(it);
    return v;
  };

  json c;
  if (name == "free-packet") {
    c = free_packet();
  } else if (name == "harmonic-ground") {
    c = harmonic_ground();
  } else if (name == "ring-eigenstate") {
    const auto w = knob("winding");
    c = ring_eigenstate(w ? parse_int("winding", *w) : 1);
  } else if (name == "gauged-ring-flux") {
    const auto f = knob("flux");
    const auto w = knob("winding");
    c = gauged_ring_flux(f ? parse_number("flux", *f) : 0.3, w ? parse_int("winding", *w) : 1);
  } else if (name == "gauge-invariance-demo") {
    const auto d = knob("draws");
    const int draws = d ? parse_int("draws", *d) : 20;
    if (draws < 1) fail(ErrorCode::invalid_argument, "draws must be positive");
    c = gauge_invariance_demo(draws);
  } else if (name == "wallstrom-superposition") {
    const auto r = knob("ratio");
    c = wallstrom(r ? parse_number("ratio", *r) : 0.5);
  } else if (name == "classical-limit") {
    c = classical_limit();
  } else {
    fail(ErrorCode::invalid_argument, "unknown preset '" + name + "'");
  }
  if (!knobs.empty()) {
    fail(ErrorCode::invalid_argument, "preset " + name + " has no knob '" + knobs.begin()->first + "'");
  }
  for (const auto& [k, v] : paths) apply_override(c, k, v);
  return c;
}

}  // namespace edlab
