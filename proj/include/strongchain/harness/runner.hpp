#pragma once

#include <map>
#include <vector>

#include "strongchain/harness/report.hpp"

namespace strongchain::harness {

struct RunResult {
  Scenario scenario;
  core::Trace trace;
  /// End-of-round mempool digests read from the live miner state.
  std::map<Round, std::map<ProcessId, Digest>> live_digests;
  Report report;
};

/// Builds processes from the scenario, runs every round and evaluates the trace.
/// Throws ScenarioError for scenarios the engine refuses (e.g. over budget).
RunResult run_scenario(const Scenario& s);

/// Evaluates an existing trace and adds the scenario's expectations, if given.
Report evaluate(const core::Trace& trace, const Expectations* expect = nullptr);

struct SweepRow {
  std::uint64_t seed = 0;
  bool ok = false;
  std::size_t violations = 0;
  std::size_t attacks = 0;
  std::size_t attack_successes = 0;
  std::size_t chain_height = 0;
  std::vector<std::string> failed_checks;
  std::string error;
};

/// Runs seeds [first, last] on `threads` workers (0 = hardware concurrency).
std::vector<SweepRow> sweep(const Scenario& s, std::uint64_t first, std::uint64_t last, unsigned threads = 0);

nlohmann::json sweep_to_json(const Scenario& s, const std::vector<SweepRow>& rows);

}  // namespace strongchain::harness
