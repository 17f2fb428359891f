#pragma once

#include <map>
#include <optional>
#include <set>

#include "strongchain/bcb/bcb.hpp"
#include "strongchain/chain/rules.hpp"

namespace strongchain::chain {

using core::ProcessId;
using core::Round;

/// Slot layout and leader schedule shared by every plug. Slot s covers rounds
/// [s*L, (s+1)*L): the leader proposes in s*L+L-2, miners vote in s*L+L-1 and
/// a block with at least 2t+1 accept votes commits at the end of that round.
struct ConsensusPlug {
  ConsensusKind kind = ConsensusKind::round_robin_strong;
  std::size_t n = 4;
  std::size_t t = 1;
  Round slot_rounds = 16;
  std::size_t block_size_limit = 8;

  /// Throws std::invalid_argument on n < 3t+1, slot_rounds < 2 or a zero limit.
  static ConsensusPlug make(ConsensusKind kind, std::size_t n, std::size_t t, Round slot_rounds,
                            std::size_t block_size_limit);

  std::uint64_t slot_of(Round r) const { return r / slot_rounds; }
  Round proposal_round(std::uint64_t slot) const { return slot * slot_rounds + slot_rounds - 2; }
  Round vote_round(std::uint64_t slot) const { return slot * slot_rounds + slot_rounds - 1; }
  bool is_proposal_round(Round r) const { return r % slot_rounds == slot_rounds - 2; }
  bool is_vote_round(Round r) const { return r % slot_rounds == slot_rounds - 1; }
  ProcessId leader(std::uint64_t slot) const { return ProcessId::miner(static_cast<std::uint32_t>(1 + slot % n)); }
  std::size_t commit_quorum() const { return 2 * t + 1; }
  bcb::Mode mode() const {
    return kind == ConsensusKind::round_robin_strong ? bcb::Mode::encrypted : bcb::Mode::plaintext;
  }
};

/// Replica of the committed chain driven by PROPOSE and VOTE messages. Miners
/// and clients both keep one.
class ConsensusView {
 public:
  explicit ConsensusView(ConsensusPlug plug);

  /// Proposals count only from the slot leader in the slot's proposal round.
  void on_propose(Round round, const ProcessId& from, const core::ProposeMessage& msg);
  /// Accept votes count once per miner, only in the slot's vote round.
  void on_vote(Round round, const ProcessId& from, const core::VoteMessage& msg);

  /// At the end of a vote round: commits the proposal holding a quorum of
  /// accepts if it extends the tip.
  std::optional<Block> decide(Round round);

  /// Proposals received for `slot`, in arrival order.
  std::vector<Block> proposals(std::uint64_t slot) const;

  const BlockTree& tree() const { return tree_; }
  const Block& tip() const { return tree_.at(tip_); }
  const ConsensusPlug& plug() const { return plug_; }

 private:
  ConsensusPlug plug_;
  BlockTree tree_;
  Digest tip_;
  std::map<std::uint64_t, std::vector<Block>> proposals_;
  std::map<std::uint64_t, std::map<Digest, std::set<ProcessId>>> votes_;
};

core::BlockHeader header_of(const Block& b);

}  // namespace strongchain::chain
