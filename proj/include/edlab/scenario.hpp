#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "edlab/field.hpp"
#include "edlab/kernel.hpp"
#include "edlab/params.hpp"
#include "edlab/phase.hpp"

namespace edlab {

inline constexpr int kScenarioSchema = 1;
inline constexpr double kDefaultSafety = 0.5;

struct Solvers {
  bool walkers = false;
  bool fields = false;
  bool schrodinger = false;

  static Solvers parse(const std::string& comma_list);
  std::vector<std::string> names() const;
};

// One pass/fail check the scenario asks for. `threshold` is an upper bound on
// the measured value unless the kind says otherwise; `target` is the
// reference some kinds measure against.
struct Criterion {
  std::string kind;
  double threshold = 0.0;
  double target = 0.0;
};

struct Superposition {
  double ratio = 0.5;  // eta beta / hbar of the winding mode
  int winding = 1;     // nu of the angle field along the loop
};

struct RandomChi {
  std::size_t modes = 3;
  double amplitude = 1.0;
  std::uint64_t seed = 7;
};

struct Scenario {
  std::string name;
  nlohmann::json config;
  Grid grid;
  ModelParams params;
  ScalarField rho0;
  PhaseRecord phase0;
  ScalarField potential;
  std::optional<GaugeInput> gauge;
  std::optional<RandomChi> chi;
  double horizon = 0.0;
  std::size_t steps = 0;
  std::size_t snapshot_every = 0;
  std::size_t walkers = 0;
  std::uint64_t seed = 0;
  Solvers solvers;
  std::size_t gauge_draws = 0;
  std::optional<Superposition> superposition;
  std::optional<double> initial_sigma;  // Gaussian rho0 width along axis 0
  std::vector<Criterion> criteria;
  std::vector<std::string> warnings;

  const GaugeInput* gauge_ptr() const { return gauge ? &*gauge : nullptr; }
};

struct ValidationIssue {
  std::string path;
  std::string message;
};

struct ValidationResult {
  std::optional<Scenario> scenario;
  std::vector<ValidationIssue> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
  nlohmann::json to_json() const;
};

ValidationResult validate_scenario(const nlohmann::json& raw);

// validate_scenario, throwing ErrorCode::validation with every issue listed.
Scenario load_scenario(const nlohmann::json& raw);

// Random smooth gauge function: a few Fourier modes per axis that are
// periodic on periodic axes.
ScalarField random_smooth_chi(const Grid& grid, const RandomChi& spec, std::uint64_t draw);

std::vector<std::string> preset_names();

// Config of a named preset. Overrides are "key=value": the preset knobs
// (winding, ratio, flux, draws) are consumed by the preset, any other key is
// a dotted path into the config and the value is parsed as JSON when possible.
nlohmann::json preset_config(const std::string& name,
                             const std::vector<std::string>& overrides = {});

void apply_override(nlohmann::json& config, const std::string& key, const std::string& value);

}  // namespace edlab
