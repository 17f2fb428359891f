#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strongchain/core/bytes.hpp"

namespace strongchain::core {

using Round = std::uint64_t;

enum class ProcessKind : std::uint8_t { miner = 0, client = 1 };

/// Miners are indexed 1..n; clients take indices above n. Ordering puts all
/// miners before all clients, which is the engine's delivery order.
struct ProcessId {
  ProcessKind kind = ProcessKind::miner;
  std::uint32_t index = 0;

  static constexpr ProcessId miner(std::uint32_t i) { return {ProcessKind::miner, i}; }
  static constexpr ProcessId client(std::uint32_t i) { return {ProcessKind::client, i}; }

  bool is_miner() const { return kind == ProcessKind::miner; }
  bool is_client() const { return kind == ProcessKind::client; }

  /// "m3" / "c7".
  std::string str() const;
  static ProcessId parse(std::string_view s);

  auto operator<=>(const ProcessId&) const = default;
};

void encode(Writer& w, const ProcessId& p);
ProcessId decode_process(Reader& r);

/// (sender, label), unique per run. Wire messages get engine-assigned numeric
/// labels; broadcast instances use protocol labels such as "tx:17".
struct MessageId {
  ProcessId sender;
  std::string label;

  std::string str() const;
  static MessageId parse(std::string_view s);

  auto operator<=>(const MessageId&) const = default;
};

void encode(Writer& w, const MessageId& m);
MessageId decode_message_id(Reader& r);

struct Transaction {
  ProcessId client;
  std::uint64_t nonce = 0;
  Bytes payload;
  std::uint64_t fee = 0;
  Digest txid;

  static Transaction make(ProcessId client, std::uint64_t nonce, Bytes payload, std::uint64_t fee);

  /// Digest of client ‖ nonce ‖ payload ‖ fee in canonical encoding.
  Digest compute_txid() const;
  bool txid_consistent() const { return compute_txid() == txid; }

  Bytes serialize() const;
  /// Throws DecodeError; the txid is recomputed, never trusted from the wire.
  static Transaction deserialize(ByteView in);

  bool operator==(const Transaction&) const = default;
};

void encode(Writer& w, const Transaction& tx);
Transaction decode_transaction(Reader& r);

/// Immutable set of txids (sorted) captured at the end of a round.
class CausalSnapshot {
 public:
  CausalSnapshot() : CausalSnapshot(0, {}) {}
  CausalSnapshot(Round round, std::vector<Digest> txids);

  Round round() const { return round_; }
  const std::vector<Digest>& txids() const { return *txids_; }
  bool contains(const Digest& txid) const;
  std::size_t size() const { return txids_->size(); }
  bool empty() const { return txids_->empty(); }
  /// Digest of the sorted txids; equal sets give equal digests.
  const Digest& digest() const { return digest_; }

 private:
  Round round_ = 0;
  std::shared_ptr<const std::vector<Digest>> txids_;
  Digest digest_;
};

struct MempoolEntry {
  Transaction tx;
  Round delivery_round = 0;
  CausalSnapshot causal_past;
};

}  // namespace strongchain::core
