#include "strongchain/chain/rules.hpp"

#include <algorithm>
#include <stdexcept>

namespace strongchain::chain {

std::string to_string(ConsensusKind k) {
  return k == ConsensusKind::round_robin_strong ? "round_robin_strong" : "fee_priority_baseline";
}

ConsensusKind parse_consensus(std::string_view s) {
  if (s == "round_robin_strong") return ConsensusKind::round_robin_strong;
  if (s == "fee_priority_baseline") return ConsensusKind::fee_priority_baseline;
  throw std::invalid_argument("unknown consensus '" + std::string(s) +
                              "' (expected round_robin_strong|fee_priority_baseline)");
}

namespace {

std::set<Digest> recorded_set(const BlockTree& tree) {
  core::ChainIndex index(tree);
  std::set<Digest> out;
  for (const auto& [txid, pos] : index.positions()) out.insert(txid);
  return out;
}

}  // namespace

bool is_safe_transaction(const std::set<Digest>& recorded, const MempoolEntry& entry) {
  return std::all_of(entry.causal_past.txids().begin(), entry.causal_past.txids().end(),
                     [&](const Digest& d) { return recorded.count(d) != 0; });
}

bool is_safe_transaction(const BlockTree& tree, const MempoolEntry& entry) {
  return is_safe_transaction(recorded_set(tree), entry);
}

bool is_safe_block(const std::set<Digest>& recorded, const Block& block, const Pool& pool) {
  std::set<Digest> earlier;
  for (const auto& tx : block.txs) {
    auto it = pool.find(tx.txid);
    if (it == pool.end() || recorded.count(tx.txid)) return false;
    for (const auto& dep : it->second.causal_past.txids()) {
      if (!recorded.count(dep) && !earlier.count(dep)) return false;
    }
    earlier.insert(tx.txid);
  }
  return true;
}

bool is_safe_block(const BlockTree& tree, const Block& block, const Pool& pool) {
  return is_safe_block(recorded_set(tree), block, pool);
}

Block propose_block(ConsensusKind kind, const Block& parent, const std::set<Digest>& recorded, const Pool& pool,
                    core::ProcessId proposer, std::size_t block_size_limit) {
  std::vector<const MempoolEntry*> order;
  for (const auto& [txid, entry] : pool) {
    if (!recorded.count(txid)) order.push_back(&entry);
  }

  std::vector<core::Transaction> txs;
  if (kind == ConsensusKind::fee_priority_baseline) {
    std::sort(order.begin(), order.end(), [](const MempoolEntry* a, const MempoolEntry* b) {
      if (a->tx.fee != b->tx.fee) return a->tx.fee > b->tx.fee;
      if (a->delivery_round != b->delivery_round) return a->delivery_round < b->delivery_round;
      return a->tx.txid < b->tx.txid;
    });
    for (const auto* e : order) {
      if (txs.size() >= block_size_limit) break;
      txs.push_back(e->tx);
    }
  } else {
    std::sort(order.begin(), order.end(), [](const MempoolEntry* a, const MempoolEntry* b) {
      if (a->delivery_round != b->delivery_round) return a->delivery_round < b->delivery_round;
      if (a->tx.fee != b->tx.fee) return a->tx.fee > b->tx.fee;
      return a->tx.txid < b->tx.txid;
    });
    // Repeat passes so a dependency sorted later still unlocks its dependents.
    std::set<Digest> chosen;
    for (bool progress = true; progress && txs.size() < block_size_limit;) {
      progress = false;
      for (const auto* e : order) {
        if (txs.size() >= block_size_limit) break;
        if (chosen.count(e->tx.txid)) continue;
        const auto& deps = e->causal_past.txids();
        bool ready = std::all_of(deps.begin(), deps.end(),
                                 [&](const Digest& d) { return recorded.count(d) || chosen.count(d); });
        if (!ready) continue;
        chosen.insert(e->tx.txid);
        txs.push_back(e->tx);
        progress = true;
        break;
      }
    }
  }
  return Block::make(parent.hash, parent.height + 1, proposer, std::move(txs));
}

std::vector<Violation> find_order_violations(const BlockTree& tree, const core::HappensBefore& hb,
                                             const std::map<Digest, core::MessageId>& envelope) {
  core::ChainIndex index(tree);
  std::vector<Digest> txids;
  std::vector<core::MessageId> messages;
  for (const auto& [txid, pos] : index.positions()) {
    auto it = envelope.find(txid);
    if (it == envelope.end() || !hb.contains(it->second)) continue;
    txids.push_back(txid);
    messages.push_back(it->second);
  }
  auto past = hb.past_membership(messages, messages);

  std::vector<Violation> out;
  for (std::size_t i = 0; i < txids.size(); ++i) {
    for (std::size_t j = 0; j < txids.size(); ++j) {
      // past[i][j]: txids[j] → txids[i]
      if (past[i][j] && *index.position(txids[i]) < *index.position(txids[j])) out.emplace_back(txids[j], txids[i]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_strong_blockchain(const BlockTree& tree, const core::HappensBefore& hb,
                          const std::map<Digest, core::MessageId>& envelope) {
  if (!core::consensus_chain(tree)) return false;
  return find_order_violations(tree, hb, envelope).empty();
}

}  // namespace strongchain::chain
