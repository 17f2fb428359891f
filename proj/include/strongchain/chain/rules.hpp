#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "strongchain/core/block.hpp"
#include "strongchain/core/happens_before.hpp"

namespace strongchain::chain {

using core::Block;
using core::BlockTree;
using core::Digest;
using core::MempoolEntry;
using Pool = std::map<Digest, MempoolEntry>;

enum class ConsensusKind : std::uint8_t { round_robin_strong, fee_priority_baseline };

std::string to_string(ConsensusKind k);
/// Throws std::invalid_argument.
ConsensusKind parse_consensus(std::string_view s);

/// Every causal-past member is recorded on the consensus chain. Throws
/// core::NoConsensusChain for an invalid tree.
bool is_safe_transaction(const BlockTree& tree, const MempoolEntry& entry);
bool is_safe_transaction(const std::set<Digest>& recorded, const MempoolEntry& entry);

/// Every transaction is in the pool and each of its unrecorded causal-past
/// members appears earlier in the block.
bool is_safe_block(const BlockTree& tree, const Block& block, const Pool& pool);
bool is_safe_block(const std::set<Digest>& recorded, const Block& block, const Pool& pool);

/// Candidate block on top of `parent`.
///   strong:   greedy over (delivery round asc, fee desc, txid asc), taking a
///             transaction only once its unrecorded causal past is already in;
///   baseline: fee desc, delivery round asc, txid asc, no causal gate.
Block propose_block(ConsensusKind kind, const Block& parent, const std::set<Digest>& recorded, const Pool& pool,
                    core::ProcessId proposer, std::size_t block_size_limit);

/// Recorded pairs (t1, t2) with t1 → t2 but t2 recorded before t1.
using Violation = std::pair<Digest, Digest>;
std::vector<Violation> find_order_violations(const BlockTree& tree, const core::HappensBefore& hb,
                                             const std::map<Digest, core::MessageId>& envelope);

/// Valid blockchain whose consensus-chain order extends happens-before.
bool is_strong_blockchain(const BlockTree& tree, const core::HappensBefore& hb,
                          const std::map<Digest, core::MessageId>& envelope);

}  // namespace strongchain::chain
