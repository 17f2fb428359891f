#include "strongchain/chain/consensus.hpp"

#include <stdexcept>

namespace strongchain::chain {

ConsensusPlug ConsensusPlug::make(ConsensusKind kind, std::size_t n, std::size_t t, Round slot_rounds,
                                  std::size_t block_size_limit) {
  if (n < 3 * t + 1) throw std::invalid_argument("consensus needs n >= 3t+1");
  if (slot_rounds < 2) throw std::invalid_argument("slot_rounds must be at least 2");
  if (block_size_limit == 0) throw std::invalid_argument("block_size_limit must be positive");
  return ConsensusPlug{kind, n, t, slot_rounds, block_size_limit};
}

ConsensusView::ConsensusView(ConsensusPlug plug) : plug_(plug), tip_(tree_.genesis()) {}

void ConsensusView::on_propose(Round round, const ProcessId& from, const core::ProposeMessage& msg) {
  if (from != plug_.leader(msg.slot) || round != plug_.proposal_round(msg.slot)) return;
  auto& list = proposals_[msg.slot];
  for (const auto& b : list) {
    if (b.hash == msg.block.hash) return;
  }
  list.push_back(msg.block);
}

void ConsensusView::on_vote(Round round, const ProcessId& from, const core::VoteMessage& msg) {
  if (!from.is_miner() || !msg.accept || round != plug_.vote_round(msg.slot)) return;
  votes_[msg.slot][msg.block_hash].insert(from);
}

std::vector<Block> ConsensusView::proposals(std::uint64_t slot) const {
  auto it = proposals_.find(slot);
  return it == proposals_.end() ? std::vector<Block>{} : it->second;
}

std::optional<Block> ConsensusView::decide(Round round) {
  if (!plug_.is_vote_round(round)) return std::nullopt;
  const std::uint64_t slot = plug_.slot_of(round);
  std::optional<Block> out;

  auto vit = votes_.find(slot);
  auto pit = proposals_.find(slot);
  if (vit != votes_.end() && pit != proposals_.end()) {
    for (const auto& block : pit->second) {
      auto v = vit->second.find(block.hash);
      if (v == vit->second.end() || v->second.size() < plug_.commit_quorum()) continue;
      if (block.parent != tip_) continue;
      try {
        tree_.add(block);
      } catch (const core::InvalidBlock&) {
        continue;
      }
      tip_ = block.hash;
      out = block;
      break;
    }
  }
  votes_.erase(votes_.begin(), votes_.upper_bound(slot));
  proposals_.erase(proposals_.begin(), proposals_.upper_bound(slot));
  return out;
}

core::BlockHeader header_of(const Block& b) {
  core::BlockHeader h{b.hash, b.parent, b.height, b.proposer, {}};
  for (const auto& tx : b.txs) h.txids.push_back(tx.txid);
  return h;
}

}  // namespace strongchain::chain
