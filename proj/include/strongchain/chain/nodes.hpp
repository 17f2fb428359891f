#pragma once

#include <functional>
#include <optional>

#include "strongchain/bcb/bcb.hpp"
#include "strongchain/brb/brb.hpp"
#include "strongchain/chain/consensus.hpp"

namespace strongchain::chain {

using rounds::Envelope;
using rounds::Outbox;

/// Correct miner running the full stack: BRB, causal broadcast, block
/// production and voting.
class MinerNode : public rounds::Process {
 public:
  /// Receives the honest proposal; a replacement may be returned.
  using ProposalFilter = std::function<std::optional<Block>(std::uint64_t slot, const Block& honest)>;

  /// vk and sk may be null for the plaintext (baseline) plug.
  MinerNode(ProcessId self, ConsensusPlug plug, const crypto::VerificationKey* vk, const crypto::SecretKeyShare* sk);

  void on_round_start(Round round, Outbox& out) override;
  void on_deliver(Round round, const Envelope& env, Outbox& out) override;
  void on_round_end(Round round, Outbox& out) override;

  /// Local validity check applied to every proposal before voting.
  bool validate(const Block& block) const;

  ProcessId id() const { return self_; }
  const bcb::BcbMinerState& bcb() const { return bcb_; }
  bcb::BcbMinerState& bcb() { return bcb_; }
  const brb::BrbEndpoint& brb() const { return brb_; }
  const BlockTree& tree() const { return view_.tree(); }
  const Block& tip() const { return view_.tip(); }
  const ConsensusPlug& plug() const { return view_.plug(); }

  void set_proposal_filter(ProposalFilter f) { filter_ = std::move(f); }

 protected:
  /// Bodies the miner stack does not consume (FORWARD, NOTE).
  virtual void on_other(Round, const Envelope&, Outbox&) {}

 private:
  ProcessId self_;
  brb::BrbEndpoint brb_;
  bcb::BcbMinerState bcb_;
  ConsensusView view_;
  ProposalFilter filter_;
  std::optional<std::uint64_t> voted_slot_;
};

struct ScriptedTx {
  Round round = 0;
  core::Bytes payload;
  std::uint64_t fee = 0;
};

/// After a committed transaction from another client whose payload contains
/// `pattern`, send a follow-up. Fires at most `max_fires` times.
struct ReactiveRule {
  std::string pattern;
  core::Bytes payload;
  std::uint64_t fee = 0;
  std::size_t max_fires = 1;
};

/// Correct client: scripted and reactive transactions, one broadcast per
/// round, and a chain replica fed by PROPOSE/VOTE.
class ClientNode : public rounds::Process {
 public:
  ClientNode(ProcessId self, ConsensusPlug plug, const crypto::PublicKey* pk, std::vector<ScriptedTx> script,
             std::vector<ReactiveRule> rules = {});

  void on_round_start(Round round, Outbox& out) override;
  void on_deliver(Round round, const Envelope& env, Outbox& out) override;
  void on_round_end(Round round, Outbox& out) override;

  /// (broadcast round, transaction) for everything sent so far.
  const std::vector<std::pair<Round, core::Transaction>>& sent() const { return sent_; }
  const BlockTree& tree() const { return view_.tree(); }

 private:
  core::Transaction next(core::Bytes payload, std::uint64_t fee);

  ProcessId self_;
  ConsensusView view_;
  const crypto::PublicKey* pk_;
  std::vector<ScriptedTx> script_;
  std::vector<ReactiveRule> rules_;
  std::vector<std::size_t> fired_;
  bcb::BroadcastQueue queue_;
  std::uint64_t nonce_ = 0;
  std::vector<std::pair<Round, core::Transaction>> sent_;
};

}  // namespace strongchain::chain
