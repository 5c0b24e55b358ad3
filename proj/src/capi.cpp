#include "edlab/edlab.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "edlab/error.hpp"
#include "edlab/gauge.hpp"
#include "edlab/run.hpp"
#include "edlab/scenario.hpp"

struct edlab_scenario {
  edlab::Scenario scenario;
};

struct edlab_report {
  edlab::ComparisonReport report;
};

namespace {

thread_local std::string last_error;

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

edlab_status status_of(edlab::ErrorCode code) {
  switch (code) {
    case edlab::ErrorCode::invalid_argument: return EDLAB_ERR_INVALID_ARGUMENT;
    case edlab::ErrorCode::validation: return EDLAB_ERR_VALIDATION;
    case edlab::ErrorCode::numerical: return EDLAB_ERR_NUMERICAL;
    case edlab::ErrorCode::io: return EDLAB_ERR_IO;
    case edlab::ErrorCode::node: return EDLAB_ERR_NODE;
  }
  return EDLAB_ERR_INTERNAL;
}

template <class F>
edlab_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return EDLAB_OK;
  } catch (const edlab::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return EDLAB_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return EDLAB_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) edlab::fail(edlab::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

nlohmann::json read_json_file(const char* path) {
  require(path, "path");
  std::ifstream in(path);
  if (!in) edlab::fail(edlab::ErrorCode::io, std::string("cannot open ") + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return nlohmann::json::parse(buf.str());
}

std::vector<std::string> override_list(const char* const* overrides, size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    require(overrides[i], "override");
    out.emplace_back(overrides[i]);
  }
  return out;
}

edlab_status validate(const nlohmann::json& config, char** result) {
  const auto v = edlab::validate_scenario(config);
  *result = copy_string(v.to_json().dump(2));
  if (!v.ok()) {
    last_error = "scenario is invalid";
    return EDLAB_ERR_VALIDATION;
  }
  return EDLAB_OK;
}

}  // namespace

extern "C" {

const char* edlab_version(void) { return "1.0.0"; }

const char* edlab_last_error(void) { return last_error.c_str(); }

void edlab_string_free(char* s) { std::free(s); }

edlab_status edlab_scenario_from_json(const char* json, edlab_scenario** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new edlab_scenario{edlab::load_scenario(nlohmann::json::parse(json))};
  });
}

edlab_status edlab_scenario_from_file(const char* path, edlab_scenario** out) {
  return guarded([&] {
    require(out, "out");
    *out = new edlab_scenario{edlab::load_scenario(read_json_file(path))};
  });
}

edlab_status edlab_scenario_from_preset(const char* name, const char* const* overrides, size_t n_overrides,
                                        edlab_scenario** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    if (n_overrides > 0) require(overrides, "overrides");
    *out = new edlab_scenario{
        edlab::load_scenario(edlab::preset_config(name, override_list(overrides, n_overrides)))};
  });
}

void edlab_scenario_free(edlab_scenario* scenario) { delete scenario; }

edlab_status edlab_scenario_config(const edlab_scenario* scenario, char** json) {
  return guarded([&] {
    require(scenario, "scenario");
    require(json, "json");
    *json = copy_string(scenario->scenario.config.dump(2));
  });
}

edlab_status edlab_validate_json(const char* json, char** result) {
  edlab_status s = EDLAB_OK;
  const edlab_status g = guarded([&] {
    require(json, "json");
    require(result, "result");
    s = validate(nlohmann::json::parse(json), result);
  });
  return g != EDLAB_OK ? g : s;
}

edlab_status edlab_validate_file(const char* path, char** result) {
  edlab_status s = EDLAB_OK;
  const edlab_status g = guarded([&] {
    require(result, "result");
    s = validate(read_json_file(path), result);
  });
  return g != EDLAB_OK ? g : s;
}

edlab_status edlab_preset_config(const char* name, const char* const* overrides, size_t n_overrides, char** json) {
  return guarded([&] {
    require(name, "name");
    require(json, "json");
    if (n_overrides > 0) require(overrides, "overrides");
    *json = copy_string(edlab::preset_config(name, override_list(overrides, n_overrides)).dump(2));
  });
}

edlab_status edlab_preset_names(char** json) {
  return guarded([&] {
    require(json, "json");
    *json = copy_string(nlohmann::json(edlab::preset_names()).dump());
  });
}

void edlab_run_options_init(edlab_run_options* options) {
  if (options) *options = edlab_run_options{nullptr, 0, 0, 0, 0, nullptr};
}

edlab_status edlab_run(const edlab_scenario* scenario, const edlab_run_options* options, edlab_report** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    edlab::RunOptions opts;
    if (options) {
      if (options->out_dir) opts.out_dir = options->out_dir;
      if (options->has_seed) opts.seed = options->seed;
      if (options->has_snapshot_every) opts.snapshot_every = options->snapshot_every;
      if (options->solvers) opts.solvers = edlab::Solvers::parse(options->solvers);
    }
    *out = new edlab_report{edlab::run_scenario(scenario->scenario, opts)};
  });
}

edlab_status edlab_report_json(const edlab_report* report, char** json) {
  return guarded([&] {
    require(report, "report");
    require(json, "json");
    *json = copy_string(edlab::dump_report(report->report.json));
  });
}

int edlab_report_passed(const edlab_report* report) { return report && report->report.passed ? 1 : 0; }

void edlab_report_free(edlab_report* report) { delete report; }

edlab_status edlab_compare_snapshots(const char* a, const char* b, char** json) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(json, "json");
    *json = copy_string(edlab::compare_snapshot_files(a, b).dump(2));
  });
}

edlab_status edlab_gauge_check(const edlab_scenario* scenario, char** json, int* passed) {
  return guarded([&] {
    require(scenario, "scenario");
    require(json, "json");
    const auto report = edlab::gauge_check_report(scenario->scenario);
    if (passed) *passed = report["passed"].get<bool>() ? 1 : 0;
    *json = copy_string(report.dump(2));
  });
}

edlab_status edlab_circulation(const edlab_scenario* scenario, const char* loop, char** json) {
  return guarded([&] {
    require(scenario, "scenario");
    require(loop, "loop");
    require(json, "json");
    *json = copy_string(edlab::circulation_report(scenario->scenario, loop).dump(2));
  });
}

edlab_status edlab_charge(double c, double eta, double beta, double hbar, double* charge, int* quantized, long* mu) {
  return guarded([&] {
    require(charge, "charge");
    edlab::ModelParams p = edlab::ModelParams::with_hbar(hbar, eta);
    p.c = c;
    p.betas = {beta};
    const auto r = edlab::charge_from_multiplier(p, 0);
    *charge = r.charge;
    if (quantized) *quantized = r.quantized ? 1 : 0;
    if (mu) *mu = r.mu;
  });
}

}  // extern "C"
