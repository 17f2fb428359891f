#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strongchain/adversary/attack.hpp"
#include "strongchain/harness/scenario.hpp"

namespace strongchain::harness {

using core::Digest;
using core::MessageId;

/// Lock-step Bracha: INIT, ECHO, READY.
inline constexpr std::size_t kLockstepGamma = 3;

struct Check {
  std::string name;
  bool asserted = true;
  bool passed = true;
  std::string detail;
};

struct InstanceStats {
  MessageId instance;
  bool correct_sender = false;
  Round broadcast_round = 0;
  std::optional<brb::BrbLatency> latency;
  std::size_t envelopes = 0;  // INIT + ECHO + READY + SHARE deliveries
  std::optional<Digest> txid;
};

struct TxLiveness {
  MessageId instance;
  Digest txid;
  Round broadcast_round = 0;
  std::optional<Round> last_arrival;  // over correct miners; unset until all arrived
  std::size_t beta = 0;
  bool within_beta = true;
  bool within_gamma = true;
};

struct AttackOutcome {
  adversary::AttackInstance attack;
  std::optional<bool> success;
  bool coincides_with_violation = false;
};

struct FairnessStats {
  std::size_t max_age_slots = 0;
  std::size_t age_bound_violations = 0;
  std::size_t dependency_inversions = 0;
};

/// Everything here is recomputed from the trace alone.
struct Report {
  core::TraceMeta meta;
  Round last_round = 0;

  /// End-of-round mempool digest per correct miner, replayed from the trace.
  std::map<Round, std::map<core::ProcessId, Digest>> mempool_digests;
  std::vector<Round> disagreeing_rounds;

  core::ProcessId reference_miner;
  core::BlockTree tree;  // reference miner's chain
  bool chain_identical = true;
  std::string chain_error;

  std::vector<InstanceStats> instances;
  std::size_t total_envelopes = 0;
  std::vector<TxLiveness> liveness;
  std::vector<chain::Violation> violations;
  std::vector<AttackOutcome> attacks;
  FairnessStats fairness;

  std::vector<Check> checks;

  bool ok() const;
  std::vector<const Check*> failures() const;
};

/// Expected envelopes per broadcast: 3n²+n encrypted, 2n²+n plaintext.
std::size_t expected_envelopes(std::size_t n, bool encrypted);

/// Replays per-miner mempools: for each correct miner, end-of-round digest of
/// MP with causal pasts equal to everything delivered or recorded in strictly
/// earlier rounds.
std::map<Round, std::map<core::ProcessId, Digest>> replay_mempool_digests(const core::Trace& trace);

/// Per miner, per txid: the causal past the protocol must have assigned.
std::map<core::ProcessId, std::map<Digest, std::vector<Digest>>> replay_causal_pasts(const core::Trace& trace);

/// txid → first INIT message of its broadcast instance.
std::map<Digest, MessageId> envelope_map(const core::Trace& trace);

/// Recorded pairs (t1, t2), t1 → t2, with t2 recorded first. Throws
/// core::NoConsensusChain.
std::vector<chain::Violation> detect_violations(const core::Trace& trace, const core::BlockTree& tree);

/// Rebuilds `miner`'s chain from its block_commit events and the transaction
/// bodies in bc_deliver events. Throws core::InvalidBlock / std::runtime_error.
core::BlockTree reconstruct_chain(const core::Trace& trace, const core::ProcessId& miner);

Report build_report(const core::Trace& trace);

/// Adds scenario expectation checks (attack outcome, violation counts).
void add_expectations(Report& r, const Expectations& e);

nlohmann::json report_to_json(const Report& r);
std::string summary(const Report& r);

/// Chain export: blocks of the reference chain with full transactions.
nlohmann::json chain_to_json(const core::BlockTree& tree, const core::TraceMeta& meta, const core::ProcessId& miner,
                             bool identical);
/// Rebuilds and validates a tree from a chain export. Throws std::runtime_error.
core::BlockTree chain_from_json(const nlohmann::json& j);

}  // namespace strongchain::harness
