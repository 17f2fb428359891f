#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "strongchain/adversary/attack.hpp"
#include "strongchain/core/json.hpp"

namespace strongchain::harness {

using core::ProcessId;
using core::Round;

inline constexpr int kScenarioSchema = 1;

/// Validation failure; `field` is a JSON path such as "clients[2].workload[0].fee".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Clients are named in scenario files; engine indices (n+1, n+2, ...) are
/// assigned at run time so that overriding n never collides with miners.
struct ClientSpec {
  std::string name;
  std::vector<chain::ScriptedTx> workload;
  std::vector<chain::ReactiveRule> reactive;
};

/// Seeded background load: each listed client sends with probability `rate`
/// per round in [from_round, until_round).
struct RandomWorkload {
  std::size_t clients = 0;
  double rate = 0.25;
  std::uint64_t fee_min = 1;
  std::uint64_t fee_max = 50;
  Round from_round = 0;
  Round until_round = 0;
  std::size_t payload_bytes = 12;
  /// Probability that a generated client also reacts to others' commits.
  double reactive_fraction = 0.0;
};

enum class AdversaryHost : std::uint8_t { miner, client };
enum class AdversaryBehavior : std::uint8_t { attack, halt };

struct AttackConfig {
  adversary::AttackKind kind = adversary::AttackKind::displacement;
  std::optional<std::string> target_client;
  std::optional<std::string> payload_prefix;
  std::uint64_t fee_multiplier = 10;
  std::optional<std::string> colluder;  // miner hosts only; created as a Byzantine client
  std::size_t filler_count = 0;
  std::size_t max_launches = 1;
};

struct AdversarySpec {
  AdversaryHost host = AdversaryHost::miner;
  std::uint32_t miner = 0;  // miner hosts
  std::string name;         // client hosts
  AdversaryBehavior behavior = AdversaryBehavior::attack;
  std::optional<AttackConfig> attack;
};

struct Expectations {
  std::optional<bool> attack_success;
  std::optional<std::size_t> min_violations;
  std::optional<std::size_t> max_violations;
};

struct Scenario {
  int schema = kScenarioSchema;
  std::string name;
  std::size_t n = 4;
  std::size_t t = 1;
  Round rounds = 64;
  std::uint64_t seed = 1;
  chain::ConsensusKind consensus = chain::ConsensusKind::round_robin_strong;
  crypto::Backend backend = crypto::Backend::mock;
  std::string group{crypto::kDefaultGroup};
  Round slot_rounds = 16;
  std::size_t block_size_limit = 8;
  std::vector<ClientSpec> clients;
  std::optional<RandomWorkload> random_workload;
  std::vector<AdversarySpec> adversaries;
  Expectations expect;

  std::size_t k() const { return 2 * t + 1; }
  /// t-1 on the strong chain, t on the baseline.
  std::size_t byzantine_miner_budget() const;
  std::size_t byzantine_miner_count() const;

  /// Engine ids for every client name: scripted clients, generated clients
  /// ("rand0", ...), adversary clients, then colluders.
  std::vector<std::pair<std::string, ProcessId>> client_ids() const;
  ProcessId client_id(const std::string& name) const;
};

/// Throws ScenarioError with the offending field path.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const Scenario& s);

/// Cross-field checks (n = 3t+1, Byzantine budget, unique ids, ...). Throws
/// ScenarioError. parse_scenario already calls it.
void validate(const Scenario& s);

struct Overrides {
  std::optional<std::size_t> n;
  std::optional<std::size_t> t;
  std::optional<std::uint64_t> seed;
  std::optional<Round> rounds;
  std::optional<crypto::Backend> backend;
};

/// Applies overrides and revalidates. Setting t alone also sets n = 3t+1.
Scenario apply(Scenario s, const Overrides& o);

}  // namespace strongchain::harness
