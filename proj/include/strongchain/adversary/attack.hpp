#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strongchain/chain/nodes.hpp"

namespace strongchain::adversary {

using core::Digest;
using core::ProcessId;
using core::Round;
using core::Transaction;

enum class AttackKind : std::uint8_t { displacement, sandwich, suppression };

std::string to_string(AttackKind k);
AttackKind parse_attack_kind(std::string_view s);

/// Which observed transactions are victims. Empty fields match anything.
struct TargetPredicate {
  std::optional<ProcessId> client;
  std::optional<std::string> payload_prefix;

  bool matches(const Transaction& tx) const;
};

struct AttackStrategy {
  AttackKind kind = AttackKind::displacement;
  TargetPredicate target;
  std::uint64_t fee_multiplier = 10;
  std::optional<ProcessId> colluder;  // miner hosts: hand plaintext to this client
  std::size_t filler_count = 0;       // suppression; 0 means block_size_limit
  std::size_t max_launches = 1;
};

/// Copy of t's payload at fee(t) × multiplier.
Transaction displacement(const AttackStrategy& s, const Transaction& t, ProcessId attacker, std::uint64_t nonce);
/// (t0, t2): t0 ahead of t1 at fee × multiplier, t2 behind it at fee / 2.
std::pair<Transaction, Transaction> sandwich(const AttackStrategy& s, const Transaction& t1, ProcessId attacker,
                                             std::uint64_t first_nonce);
/// `count` high-fee fillers.
std::vector<Transaction> suppression(const AttackStrategy& s, const Transaction& t, ProcessId attacker,
                                     std::uint64_t first_nonce, std::size_t count);

struct AttackInstance {
  AttackKind kind = AttackKind::displacement;
  ProcessId host;
  Round launch_round = 0;
  Digest victim;
  std::vector<Digest> injected;
};

/// attack_launch events in trace order.
std::vector<AttackInstance> attack_instances(const core::Trace& trace);

/// Positional success on the consensus chain:
///   displacement  injected recorded before the victim (or victim never recorded);
///   sandwich      t0 < t1 < t2 inside one block;
///   suppression   the first committed block that is full or holds the victim is
///                 full, holds a filler and not the victim.
/// nullopt when the attack was never launched (no injected transactions).
std::optional<bool> attack_success(const core::Trace& trace, const core::BlockTree& tree, const AttackInstance& a);

/// Turns observed victims into injected transactions, one broadcast per round.
class AttackPlanner {
 public:
  AttackPlanner(ProcessId self, AttackStrategy strategy, std::size_t block_size_limit);

  /// Launches against `tx` if it is a fresh match; records attack_launch.
  bool observe(const Transaction& tx, rounds::Outbox& out);
  /// Sends the next queued injection, if any.
  void release(rounds::Outbox& out, bcb::Mode mode, const crypto::PublicKey* pk);

  const AttackStrategy& strategy() const { return strategy_; }
  const std::vector<AttackInstance>& launched() const { return launched_; }
  bool is_injected(const Digest& txid) const;

 private:
  ProcessId self_;
  AttackStrategy strategy_;
  std::size_t block_size_limit_;
  std::uint64_t nonce_ = 0;
  std::vector<AttackInstance> launched_;
  std::set<Digest> seen_;
  bcb::BroadcastQueue queue_;
};

/// Byzantine miner: runs the miner stack, reads plaintext when a transaction
/// enters its own mempool (BC_deliver on the strong chain, BR_deliver on the
/// baseline) and, when leader, proposes injected transactions first.
class AttackingMiner : public chain::MinerNode {
 public:
  AttackingMiner(ProcessId self, chain::ConsensusPlug plug, const crypto::VerificationKey* vk,
                 const crypto::SecretKeyShare* sk, const crypto::PublicKey* pk, AttackStrategy strategy);

  void on_round_start(Round round, rounds::Outbox& out) override;
  const AttackPlanner& planner() const { return planner_; }

 private:
  std::optional<chain::Block> reorder(std::uint64_t slot, const chain::Block& honest) const;

  const crypto::PublicKey* pk_;
  AttackPlanner planner_;
  std::set<Digest> forwarded_victims_;
};

/// Byzantine client. Learns plaintext from PROPOSE messages it receives, or
/// from FORWARD messages sent by a colluding miner.
class AttackingClient : public rounds::Process {
 public:
  AttackingClient(ProcessId self, chain::ConsensusPlug plug, const crypto::PublicKey* pk, AttackStrategy strategy,
                  std::optional<ProcessId> partner = std::nullopt);

  void on_round_start(Round round, rounds::Outbox& out) override;
  void on_deliver(Round round, const rounds::Envelope& env, rounds::Outbox& out) override;
  const AttackPlanner& planner() const { return planner_; }

 private:
  chain::ConsensusPlug plug_;
  const crypto::PublicKey* pk_;
  AttackPlanner planner_;
  std::optional<ProcessId> partner_;
};

}  // namespace strongchain::adversary
