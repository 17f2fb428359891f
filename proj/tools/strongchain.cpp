#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

#include "strongchain/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace strongchain;
using nlohmann::json;

namespace {

struct OverrideFlags {
  std::optional<std::size_t> n, t;
  std::optional<std::uint64_t> seed;
  std::optional<core::Round> rounds;
  std::optional<std::string> backend;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "Number of miners");
    app->add_option("--t", t, "Fault threshold (sets n = 3t+1 unless --n is given)");
    app->add_option("--seed", seed, "Run seed");
    app->add_option("--rounds", rounds, "Rounds to execute");
    app->add_option("--backend", backend, "Threshold backend")->check(CLI::IsMember({"mock", "dlog"}));
  }

  harness::Overrides get() const {
    harness::Overrides o;
    o.n = n;
    o.t = t;
    o.seed = seed;
    o.rounds = rounds;
    if (backend) o.backend = crypto::parse_backend(*backend);
    return o;
  }
};

core::Trace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return core::read_jsonl(in);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int exit_code(const harness::Report& r) { return r.ok() ? 0 : 1; }

int cmd_run(const std::string& scenario_path, const OverrideFlags& flags, const std::string& out_dir, bool quiet) {
  auto s = harness::apply(harness::load_scenario(scenario_path), flags.get());
  auto res = harness::run_scenario(s);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream trace(fs::path(out_dir) / "trace.jsonl");
    core::write_jsonl(trace, res.trace);
    const auto& rep = res.report;
    write_file(fs::path(out_dir) / "chain.json",
               harness::chain_to_json(rep.tree, rep.meta, rep.reference_miner, rep.chain_identical).dump(2) + "\n");
    write_file(fs::path(out_dir) / "report.json", harness::report_to_json(rep).dump(2) + "\n");
    write_file(fs::path(out_dir) / "summary.txt", harness::summary(rep));
  }
  if (!quiet) std::cout << harness::summary(res.report);
  return exit_code(res.report);
}

int cmd_verify(const std::string& trace_path, const std::string& chain_path) {
  auto trace = read_trace(trace_path);
  auto rep = harness::build_report(trace);
  const json export_json = read_json(chain_path);
  bool matches = false;
  std::string detail;
  try {
    auto exported = harness::chain_from_json(export_json);
    auto a = core::consensus_chain(exported);
    auto b = core::consensus_chain(rep.tree);
    matches = a && b && a->size() == b->size();
    for (std::size_t i = 0; matches && i < a->size(); ++i) matches = (*a)[i]->hash == (*b)[i]->hash;
    detail = "export height " + std::to_string(exported.depth()) + ", trace height " + std::to_string(rep.tree.depth());
  } catch (const std::exception& e) {
    detail = e.what();
  }
  rep.checks.push_back(harness::Check{"export.matches_trace", true, matches, detail});
  std::cout << harness::summary(rep);
  return exit_code(rep);
}

int cmd_report(const std::string& trace_path, const std::string& json_out, bool json_stdout) {
  auto rep = harness::build_report(read_trace(trace_path));
  const std::string text = harness::report_to_json(rep).dump(2) + "\n";
  if (!json_out.empty()) write_file(json_out, text);
  if (json_stdout) {
    std::cout << text;
  } else {
    std::cout << harness::summary(rep);
  }
  return exit_code(rep);
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  static const std::regex range(R"((\d+)\.\.(\d+))");
  std::smatch m;
  if (std::regex_match(s, m, range)) return {std::stoull(m[1]), std::stoull(m[2])};
  if (std::regex_match(s, std::regex(R"(\d+)"))) return {std::stoull(s), std::stoull(s)};
  throw CLI::ValidationError("--seeds", "expected a..b, got '" + s + "'");
}

int cmd_sweep(const std::string& scenario_path, const OverrideFlags& flags, const std::string& seeds,
              unsigned threads, const std::string& out) {
  auto [first, last] = parse_seed_range(seeds);
  auto s = harness::apply(harness::load_scenario(scenario_path), flags.get());
  auto rows = harness::sweep(s, first, last, threads);
  const json j = harness::sweep_to_json(s, rows);
  if (!out.empty()) write_file(out, j.dump(2) + "\n");
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.ok;
    std::cout << "seed " << r.seed << "  " << (r.ok ? "ok  " : "FAIL") << "  height " << r.chain_height
              << "  violations " << r.violations << "  attacks " << r.attack_successes << "/" << r.attacks
              << " succeeded";
    if (!r.error.empty()) std::cout << "  error: " << r.error;
    for (const auto& c : r.failed_checks) std::cout << "  " << c;
    std::cout << "\n";
  }
  std::cout << j.at("passed").get<std::size_t>() << "/" << rows.size() << " seeds passed\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Round-based simulator for a causally ordered blockchain"};
  app.require_subcommand(1);

  OverrideFlags run_flags, sweep_flags;
  std::string scenario_path, out_dir, trace_path, chain_path, json_out, seeds, sweep_out;
  bool quiet = false, json_stdout = false;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run a scenario and check every invariant");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Directory for trace.jsonl, chain.json, report.json");
  run->add_flag("--quiet", quiet, "Suppress the summary");
  run_flags.attach(run);

  auto* verify = app.add_subcommand("verify", "Re-check a trace and compare it with a chain export");
  verify->add_option("trace", trace_path, "Trace JSONL")->required()->check(CLI::ExistingFile);
  verify->add_option("chain", chain_path, "Chain export JSON")->required()->check(CLI::ExistingFile);

  auto* sw = app.add_subcommand("sweep", "Run a scenario over a range of seeds");
  sw->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--seeds", seeds, "Seed range a..b")->required();
  sw->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sw->add_option("--out", sweep_out, "Write per-seed results as JSON");
  sweep_flags.attach(sw);

  auto* report = app.add_subcommand("report", "Summarise a trace");
  report->add_option("trace", trace_path, "Trace JSONL")->required()->check(CLI::ExistingFile);
  report->add_option("--out", json_out, "Write report JSON");
  report->add_flag("--json", json_stdout, "Print report JSON instead of the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(scenario_path, run_flags, out_dir, quiet);
    if (*verify) return cmd_verify(trace_path, chain_path);
    if (*sw) return cmd_sweep(scenario_path, sweep_flags, seeds, threads, sweep_out);
    if (*report) return cmd_report(trace_path, json_out, json_stdout);
  } catch (const harness::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
