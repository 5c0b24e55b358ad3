#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "edlab/scenario.hpp"

namespace edlab {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> snapshot_every;
  std::optional<Solvers> solvers;
};

struct ComparisonReport {
  nlohmann::json json;  // the content of report.json
  bool passed = false;
};

// Runs the requested solvers in lockstep, evaluates every criterion of the
// scenario once and, with an output directory, writes report.json,
// series.csv and field snapshots. Criteria whose solver was switched off by
// the options are reported as skipped.
ComparisonReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Report JSON with a stable key order; the "meta" block holds the only
// run-dependent field.
std::string dump_report(const nlohmann::json& report);

// Quantization verdicts, charges and (with a superposition block) the
// closure mismatch of the ring witness.
nlohmann::json gauge_check_report(const Scenario& scenario);

nlohmann::json circulation_report(const Scenario& scenario, const std::string& loop_spec);

// L1 and Linf between the first value columns of two snapshot files.
nlohmann::json compare_snapshot_files(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace edlab
