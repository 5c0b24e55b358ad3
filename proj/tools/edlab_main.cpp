// Command-line front end. Talks to the library only through edlab.h.
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edlab/edlab.h"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitError = 3;

struct Owned {
  char* s = nullptr;
  ~Owned() { edlab_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

int report_error(const char* what, edlab_status status) {
  std::fprintf(stderr, "edlab: %s: %s\n", what, edlab_last_error());
  return status == EDLAB_ERR_VALIDATION || status == EDLAB_ERR_INVALID_ARGUMENT ? kExitInvalid : kExitError;
}

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> snapshots;
  std::string solvers;
  bool json = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--seed", f.seed, "Master seed of the walker ensemble");
  app->add_option("--out", f.out, "Output directory (default runs/<scenario>)");
  app->add_option("--snapshots", f.snapshots, "Write snapshots every k steps (0: first and last only)");
  app->add_option("--solvers", f.solvers, "Comma list of walkers,fields,schrodinger");
  app->add_flag("--json", f.json, "Print report.json to stdout");
}

int run(edlab_scenario* sc, const RunFlags& f) {
  Owned cfg;
  if (edlab_scenario_config(sc, &cfg.s) != EDLAB_OK) return report_error("config", EDLAB_ERR_INTERNAL);
  const std::string name = nlohmann::json::parse(cfg.str()).value("name", "scenario");
  const std::string out = f.out.empty() ? "runs/" + name : f.out;

  edlab_run_options opts;
  edlab_run_options_init(&opts);
  opts.out_dir = out.c_str();
  if (f.seed) {
    opts.has_seed = 1;
    opts.seed = *f.seed;
  }
  if (f.snapshots) {
    opts.has_snapshot_every = 1;
    opts.snapshot_every = *f.snapshots;
  }
  if (!f.solvers.empty()) opts.solvers = f.solvers.c_str();

  const auto t0 = std::chrono::steady_clock::now();
  edlab_report* report = nullptr;
  const edlab_status st = edlab_run(sc, &opts, &report);
  if (st != EDLAB_OK) return report_error("run failed", st);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Owned text;
  edlab_report_json(report, &text.s);
  const bool passed = edlab_report_passed(report) != 0;
  edlab_report_free(report);
  if (f.json) {
    std::fputs(text.str().c_str(), stdout);
  } else {
    const auto j = nlohmann::json::parse(text.str());
    std::printf("%s: %zu steps, dt = %.6g, solvers [%s]\n", name.c_str(), j["steps"].get<std::size_t>(),
                j["dt"].get<double>(), f.solvers.empty() ? "scenario default" : f.solvers.c_str());
    for (const auto& w : j["warnings"]) std::printf("  warning: %s\n", w.get<std::string>().c_str());
    for (const auto& c : j["criteria"]) {
      const std::string status = c["status"];
      if (status == "skipped") {
        std::printf("  %-5s %-30s (%s)\n", "SKIP", c["kind"].get<std::string>().c_str(),
                    c["reason"].get<std::string>().c_str());
      } else {
        std::printf("  %-5s %-30s %.6g %s %.6g\n", status == "pass" ? "PASS" : "FAIL",
                    c["kind"].get<std::string>().c_str(), c["value"].get<double>(),
                    c["comparison"].get<std::string>().c_str(), c["threshold"].get<double>());
      }
    }
    std::printf("%s in %.1f s, output in %s\n", passed ? "passed" : "FAILED", seconds, out.c_str());
  }
  return passed ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic-dynamics quantum lab: walkers, field equations and Schroedinger reference"};
  app.require_subcommand(1);
  app.set_version_flag("--version", edlab_version());

  RunFlags run_flags;
  std::string config;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario config");
  run_cmd->add_option("config", config, "Scenario JSON")->required();
  add_run_flags(run_cmd, run_flags);

  auto* validate_cmd = app.add_subcommand("validate", "Validate a scenario config");
  validate_cmd->add_option("config", config, "Scenario JSON")->required();

  std::string preset;
  std::vector<std::string> overrides;
  bool dump_config = false;
  bool list = false;
  auto* preset_cmd = app.add_subcommand("preset", "Run a built-in scenario");
  preset_cmd->add_option("name", preset, "Preset name");
  preset_cmd->add_option("--override", overrides, "key=value (preset knob or dotted config path)");
  preset_cmd->add_flag("--dump-config", dump_config, "Print the preset config instead of running it");
  preset_cmd->add_flag("--list", list, "List preset names");
  add_run_flags(preset_cmd, run_flags);

  std::string snap_a;
  std::string snap_b;
  auto* compare_cmd = app.add_subcommand("compare", "L1/Linf distance between two field snapshots");
  compare_cmd->add_option("snapA", snap_a)->required();
  compare_cmd->add_option("snapB", snap_b)->required();

  auto* gauge_cmd = app.add_subcommand("gauge-check", "Quantization verdicts, charges and closure jumps");
  gauge_cmd->add_option("config", config, "Scenario JSON")->required();

  std::string loop;
  auto* circ_cmd = app.add_subcommand("circulation", "Phase circulation around a loop");
  circ_cmd->add_option("config", config, "Scenario JSON")->required();
  circ_cmd->add_option("--loop", loop, "axis:<a>[@offset] or rect:i0,j0,i1,j1")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (*validate_cmd) {
    Owned result;
    const edlab_status st = edlab_validate_file(config.c_str(), &result.s);
    if (!result.s) return report_error("validate", st);
    std::printf("%s\n", result.str().c_str());
    return st == EDLAB_OK ? 0 : kExitInvalid;
  }

  if (*compare_cmd) {
    Owned result;
    const edlab_status st = edlab_compare_snapshots(snap_a.c_str(), snap_b.c_str(), &result.s);
    if (st != EDLAB_OK) return report_error("compare", st);
    std::printf("%s\n", result.str().c_str());
    return 0;
  }

  if (*preset_cmd) {
    if (list) {
      Owned names;
      edlab_preset_names(&names.s);
      for (const auto& n : nlohmann::json::parse(names.str())) std::printf("%s\n", n.get<std::string>().c_str());
      return 0;
    }
    if (preset.empty()) {
      std::fprintf(stderr, "edlab: preset needs a name (see --list)\n");
      return kExitInvalid;
    }
    std::vector<const char*> ov;
    for (const auto& o : overrides) ov.push_back(o.c_str());
    if (dump_config) {
      Owned cfg;
      const edlab_status st = edlab_preset_config(preset.c_str(), ov.data(), ov.size(), &cfg.s);
      if (st != EDLAB_OK) return report_error("preset", st);
      std::printf("%s\n", cfg.str().c_str());
      return 0;
    }
    edlab_scenario* sc = nullptr;
    const edlab_status st = edlab_scenario_from_preset(preset.c_str(), ov.data(), ov.size(), &sc);
    if (st != EDLAB_OK) return report_error("preset", st);
    const int code = run(sc, run_flags);
    edlab_scenario_free(sc);
    return code;
  }

  edlab_scenario* sc = nullptr;
  const edlab_status st = edlab_scenario_from_file(config.c_str(), &sc);
  if (st != EDLAB_OK) return report_error(config.c_str(), st);
  int code = 0;
  if (*run_cmd) {
    code = run(sc, run_flags);
  } else if (*gauge_cmd) {
    Owned result;
    int passed = 0;
    const edlab_status g = edlab_gauge_check(sc, &result.s, &passed);
    if (g != EDLAB_OK) {
      code = report_error("gauge-check", g);
    } else {
      std::printf("%s\n", result.str().c_str());
      code = passed ? 0 : kExitFailed;
    }
  } else if (*circ_cmd) {
    Owned result;
    const edlab_status c = edlab_circulation(sc, loop.c_str(), &result.s);
    if (c != EDLAB_OK) {
      code = report_error("circulation", c);
    } else {
      std::printf("%s\n", result.str().c_str());
    }
  }
  edlab_scenario_free(sc);
  return code;
}
