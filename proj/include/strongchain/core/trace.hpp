#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "strongchain/core/types.hpp"

namespace strongchain::core {

enum class EventKind : std::uint8_t { send, deliver, br_deliver, bc_deliver, block_commit, attack_launch };

std::string to_string(EventKind kind);
EventKind parse_event_kind(std::string_view s);

struct BlockHeader {
  Digest hash;
  Digest parent;
  std::uint64_t height = 0;
  ProcessId proposer;
  std::vector<Digest> txids;

  bool operator==(const BlockHeader&) const = default;
};

struct AttackRecord {
  std::string kind;
  Digest victim;
  std::vector<Digest> injected;

  bool operator==(const AttackRecord&) const = default;
};

/// One engine-stamped event. Which optional fields are set depends on kind:
///   send/deliver   message, tag, instance (for BRB phases and shares), fanout (send)
///   br_deliver     instance
///   bc_deliver     instance, tx (mempool arrival)
///   block_commit   block
///   attack_launch  attack
struct TraceEvent {
  Round round = 0;
  std::uint64_t seq = 0;
  ProcessId process;
  EventKind kind = EventKind::send;
  std::optional<MessageId> message;
  std::string tag;
  std::optional<MessageId> instance;
  std::uint32_t fanout = 0;
  std::optional<Transaction> tx;
  std::optional<BlockHeader> block;
  std::optional<AttackRecord> attack;

  bool operator==(const TraceEvent&) const = default;
};

struct TraceMeta {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t t = 0;
  std::size_t k = 0;
  std::string digest = "sha256";
  std::string backend;
  std::string consensus;
  Round rounds = 0;
  Round slot_rounds = 0;
  std::size_t block_size_limit = 0;
  std::vector<ProcessId> miners;
  std::vector<ProcessId> clients;
  std::vector<ProcessId> byzantine;

  bool is_byzantine(const ProcessId& p) const;
  std::vector<ProcessId> correct_miners() const;

  bool operator==(const TraceMeta&) const = default;
};

struct Trace {
  TraceMeta meta;
  std::vector<TraceEvent> events;
};

/// Line-delimited JSON: a {"type":"meta",...} record followed by one record per
/// event in engine order.
void write_jsonl(std::ostream& out, const Trace& trace);
Trace read_jsonl(std::istream& in);
std::string event_to_json(const TraceEvent& ev);
TraceEvent event_from_json(std::string_view line);

}  // namespace strongchain::core
