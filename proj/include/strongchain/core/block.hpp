#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "strongchain/core/types.hpp"

namespace strongchain::core {

/// Parent hash of the genesis block and the genesis hash itself.
inline const Digest kGenesisHash{};

struct Block {
  Digest parent;
  std::uint64_t height = 0;
  ProcessId proposer;
  std::vector<Transaction> txs;
  Digest hash;

  static Block make(const Digest& parent, std::uint64_t height, ProcessId proposer, std::vector<Transaction> txs);
  static Block genesis();

  /// Digest of parent ‖ proposer ‖ txs.
  Digest compute_hash() const;
  bool is_genesis() const { return hash == kGenesisHash; }
  bool contains(const Digest& txid) const;

  Bytes serialize() const;
  static Block deserialize(ByteView in);
};

void encode(Writer& w, const Block& b);
Block decode_block(Reader& r);

class InvalidBlock : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tree of blocks keyed by hash. Every non-genesis block has its parent in the
/// map, so orphans and cycles cannot be represented.
class BlockTree {
 public:
  BlockTree();

  /// Throws InvalidBlock when the parent is unknown, the height does not follow
  /// the parent, the hash does not match the contents, or a txid repeats within
  /// the block or along its ancestry.
  void add(Block block);

  bool contains(const Digest& hash) const { return blocks_.count(hash) != 0; }
  const Block& at(const Digest& hash) const;
  const Digest& genesis() const { return genesis_; }
  std::size_t size() const { return blocks_.size(); }
  const std::map<Digest, Block>& blocks() const { return blocks_; }

  std::vector<const Block*> leaves() const;
  /// Root-to-block path, genesis first.
  std::vector<const Block*> path_to(const Digest& hash) const;
  std::uint64_t depth() const;

 private:
  std::map<Digest, Block> blocks_;
  std::map<Digest, std::vector<Digest>> children_;
  Digest genesis_;
};

/// Unique root-to-deepest-leaf path, or nullopt when two or more leaves tie at
/// maximal depth (the tree is then not a valid blockchain).
std::optional<std::vector<const Block*>> consensus_chain(const BlockTree& tree);

struct TxPosition {
  std::size_t block_index = 0;
  std::size_t index = 0;
  auto operator<=>(const TxPosition&) const = default;
};

class NoConsensusChain : public std::runtime_error {
 public:
  NoConsensusChain() : std::runtime_error("block tree has no unique consensus chain") {}
};

/// Throws NoConsensusChain when the tree is not a valid blockchain.
std::optional<TxPosition> recorded_position(const BlockTree& tree, const Digest& txid);

/// Position index over a consensus chain, for repeated queries.
class ChainIndex {
 public:
  /// Throws NoConsensusChain.
  explicit ChainIndex(const BlockTree& tree);

  std::optional<TxPosition> position(const Digest& txid) const;
  bool recorded(const Digest& txid) const { return positions_.count(txid) != 0; }
  const std::map<Digest, TxPosition>& positions() const { return positions_; }
  const std::vector<const Block*>& chain() const { return chain_; }

 private:
  std::vector<const Block*> chain_;
  std::map<Digest, TxPosition> positions_;
};

}  // namespace strongchain::core
