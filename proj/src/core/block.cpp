#include "strongchain/core/block.hpp"

#include <algorithm>

#include "strongchain/core/hash.hpp"

namespace strongchain::core {

Block Block::make(const Digest& parent, std::uint64_t height, ProcessId proposer, std::vector<Transaction> txs) {
  Block b{parent, height, proposer, std::move(txs), {}};
  b.hash = b.compute_hash();
  return b;
}

Block Block::genesis() { return Block{kGenesisHash, 0, ProcessId::miner(0), {}, kGenesisHash}; }

Digest Block::compute_hash() const {
  Writer w;
  w.digest(parent);
  encode(w, proposer);
  w.u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& tx : txs) encode(w, tx);
  return sha256(w.data());
}

bool Block::contains(const Digest& txid) const {
  return std::any_of(txs.begin(), txs.end(), [&](const Transaction& t) { return t.txid == txid; });
}

void encode(Writer& w, const Block& b) {
  w.digest(b.parent).u64(b.height);
  encode(w, b.proposer);
  w.u32(static_cast<std::uint32_t>(b.txs.size()));
  for (const auto& tx : b.txs) encode(w, tx);
}

Block decode_block(Reader& r) {
  Digest parent = r.digest();
  std::uint64_t height = r.u64();
  ProcessId proposer = decode_process(r);
  std::uint32_t count = r.u32();
  std::vector<Transaction> txs;
  for (std::uint32_t i = 0; i < count; ++i) txs.push_back(decode_transaction(r));
  return Block::make(parent, height, proposer, std::move(txs));
}

Bytes Block::serialize() const {
  Writer w;
  encode(w, *this);
  return w.take();
}

Block Block::deserialize(ByteView in) {
  Reader r(in);
  Block b = decode_block(r);
  r.expect_done();
  return b;
}

BlockTree::BlockTree() {
  Block g = Block::genesis();
  genesis_ = g.hash;
  blocks_.emplace(g.hash, std::move(g));
}

const Block& BlockTree::at(const Digest& hash) const {
  auto it = blocks_.find(hash);
  if (it == blocks_.end()) throw std::out_of_range("unknown block " + hash.hex());
  return it->second;
}

void BlockTree::add(Block block) {
  if (block.hash == kGenesisHash) throw InvalidBlock("cannot add a second genesis");
  if (block.compute_hash() != block.hash) throw InvalidBlock("block hash does not match contents");
  if (blocks_.count(block.hash)) throw InvalidBlock("duplicate block " + block.hash.hex());
  auto parent = blocks_.find(block.parent);
  if (parent == blocks_.end()) throw InvalidBlock("orphan block: unknown parent " + block.parent.hex());
  if (block.height != parent->second.height + 1) throw InvalidBlock("height does not follow parent");

  std::set<Digest> seen;
  for (const auto& tx : block.txs) {
    if (!seen.insert(tx.txid).second) throw InvalidBlock("duplicate txid within block");
  }
  for (const Block* ancestor : path_to(block.parent)) {
    for (const auto& tx : ancestor->txs) {
      if (seen.count(tx.txid)) throw InvalidBlock("txid already recorded in an ancestor");
    }
  }
  children_[block.parent].push_back(block.hash);
  blocks_.emplace(block.hash, std::move(block));
}

std::vector<const Block*> BlockTree::leaves() const {
  std::vector<const Block*> out;
  for (const auto& [hash, block] : blocks_) {
    auto it = children_.find(hash);
    if (it == children_.end() || it->second.empty()) out.push_back(&block);
  }
  return out;
}

std::vector<const Block*> BlockTree::path_to(const Digest& hash) const {
  std::vector<const Block*> path;
  const Block* cur = &at(hash);
  while (true) {
    path.push_back(cur);
    if (cur->is_genesis()) break;
    cur = &at(cur->parent);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::uint64_t BlockTree::depth() const {
  std::uint64_t d = 0;
  for (const auto& [hash, block] : blocks_) d = std::max(d, block.height);
  return d;
}

std::optional<std::vector<const Block*>> consensus_chain(const BlockTree& tree) {
  const std::uint64_t depth = tree.depth();
  const Block* deepest = nullptr;
  for (const Block* leaf : tree.leaves()) {
    if (leaf->height != depth) continue;
    if (deepest != nullptr) return std::nullopt;
    deepest = leaf;
  }
  return tree.path_to(deepest->hash);
}

std::optional<TxPosition> recorded_position(const BlockTree& tree, const Digest& txid) {
  return ChainIndex(tree).position(txid);
}

ChainIndex::ChainIndex(const BlockTree& tree) {
  auto chain = consensus_chain(tree);
  if (!chain) throw NoConsensusChain();
  chain_ = std::move(*chain);
  for (std::size_t b = 0; b < chain_.size(); ++b) {
    const auto& txs = chain_[b]->txs;
    for (std::size_t i = 0; i < txs.size(); ++i) positions_.emplace(txs[i].txid, TxPosition{b, i});
  }
}

std::optional<TxPosition> ChainIndex::position(const Digest& txid) const {
  auto it = positions_.find(txid);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

}  // namespace strongchain::core
