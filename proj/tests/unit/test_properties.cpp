#include <doctest.h>

#include <random>

#include "strongchain/harness/runner.hpp"
#include "support.hpp"

using namespace strongchain;
using namespace strongchain::harness;

namespace {

/// Random strong-chain scenario: load, slot layout, silent miners within
/// budget, and a Byzantine client running a random attack.
Scenario random_scenario(std::uint64_t seed, chain::ConsensusKind kind) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng); };
  Scenario s;
  s.name = "prop" + std::to_string(seed);
  s.t = pick(1, 2);
  s.n = 3 * s.t + 1;
  s.seed = seed;
  s.consensus = kind;
  s.slot_rounds = std::vector<Round>{4, 8, 16}[pick(0, 2)];
  s.block_size_limit = pick(2, 8);
  s.rounds = 8 * s.slot_rounds + pick(0, 8);
  RandomWorkload w;
  w.clients = pick(2, 6);
  w.rate = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
  w.fee_min = 1;
  w.fee_max = pick(1, 100);
  w.until_round = s.rounds - s.slot_rounds;
  w.reactive_fraction = std::uniform_real_distribution<double>(0, 1)(rng);
  s.random_workload = w;
  const std::size_t silent = pick(0, s.byzantine_miner_budget());
  for (std::size_t i = 0; i < silent; ++i) {
    AdversarySpec a;
    a.host = AdversaryHost::miner;
    a.miner = static_cast<std::uint32_t>(s.n - i);
    a.behavior = AdversaryBehavior::halt;
    s.adversaries.push_back(a);
  }
  AdversarySpec eve;
  eve.host = AdversaryHost::client;
  eve.name = "eve";
  AttackConfig atk;
  atk.kind = static_cast<adversary::AttackKind>(pick(0, 2));
  atk.target_client = "rand0";
  atk.max_launches = pick(1, 3);
  eve.attack = atk;
  s.adversaries.push_back(eve);
  validate(s);
  return s;
}

}  // namespace

TEST_CASE("property: strong-chain invariants hold on random scenarios") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto s = random_scenario(seed, chain::ConsensusKind::round_robin_strong);
    CAPTURE(seed);
    const auto res = run_scenario(s);
    for (const auto* c : res.report.failures()) FAIL_CHECK(c->name << ": " << c->detail);
    CHECK(res.report.violations.empty());
    CHECK(res.report.disagreeing_rounds.empty());
    for (const auto& a : res.report.attacks) CHECK(a.success != true);
    for (const auto& l : res.report.liveness) CHECK(l.within_gamma);
  }
}

TEST_CASE("property: baseline keeps agreement and liveness but not causal order") {
  std::size_t runs_with_violations = 0;
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto s = random_scenario(seed, chain::ConsensusKind::fee_priority_baseline);
    CAPTURE(seed);
    const auto res = run_scenario(s);
    for (const auto* c : res.report.failures()) FAIL_CHECK(c->name << ": " << c->detail);
    runs_with_violations += res.report.violations.empty() ? 0 : 1;
  }
  CHECK(runs_with_violations > 0);
}

TEST_CASE("property: every successful attack on the baseline is a causal violation") {
  for (auto name : {"baseline_displacement_t1", "baseline_sandwich_t2", "baseline_suppression_t1"}) {
    const auto base = load_scenario(std::string(STRONGCHAIN_SCENARIO_DIR) + "/" + name + ".json");
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Overrides o;
      o.seed = seed;
      const auto res = run_scenario(apply(base, o));
      for (const auto& a : res.report.attacks) {
        if (a.success == true) CHECK(a.coincides_with_violation);
      }
    }
  }
}

TEST_CASE("property: runs are reproducible from the seed") {
  const auto s = random_scenario(4, chain::ConsensusKind::round_robin_strong);
  CHECK(run_scenario(s).trace.events == run_scenario(s).trace.events);
}
