#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>

#include "strongchain/core/trace.hpp"
#include "strongchain/rounds/engine.hpp"

namespace strongchain::brb {

using core::Bytes;
using core::Digest;
using core::MessageId;
using core::ProcessId;
using core::Round;

/// Bracha quorums among the n miners. The broadcasting client is not counted.
struct BrbConfig {
  std::size_t n = 4;
  std::size_t t = 1;

  std::size_t echo_threshold() const { return n - t; }
  std::size_t ready_threshold_send() const { return t + 1; }
  std::size_t ready_threshold_deliver() const { return 2 * t + 1; }

  /// Throws std::invalid_argument unless n >= 3t + 1.
  static BrbConfig make(std::size_t n, std::size_t t);
};

struct BrbDelivery {
  MessageId instance;
  Digest digest;
  Bytes payload;
};

/// Per-miner Bracha state for every instance this miner has heard of.
class BrbEndpoint {
 public:
  explicit BrbEndpoint(BrbConfig config) : config_(config) {}

  /// Processes one phase message. Resulting ECHO/READY sends go through `out`
  /// (so they leave next round). Returns the delivery at most once per instance.
  std::optional<BrbDelivery> on_message(const ProcessId& from, const core::BrbMessage& msg, rounds::Outbox& out);

  bool delivered(const MessageId& instance) const;
  bool echoed(const MessageId& instance) const;
  bool readied(const MessageId& instance) const;
  std::size_t instance_count() const { return instances_.size(); }
  const BrbConfig& config() const { return config_; }

 private:
  struct Instance {
    bool seen_init = false;
    bool echoed = false;
    bool readied = false;
    bool delivered = false;
    std::map<Digest, std::set<ProcessId>> echoes;
    std::map<Digest, std::set<ProcessId>> readies;
    std::map<Digest, Bytes> bodies;
  };

  std::optional<BrbDelivery> try_deliver(const MessageId& id, Instance& inst, const Digest& d);

  BrbConfig config_;
  std::map<MessageId, Instance> instances_;
};

/// INIT(body) to every miner in the current send opportunity.
void br_broadcast(rounds::Outbox& out, const MessageId& instance, Bytes payload);

core::BrbMessage make_phase(core::BrbPhase phase, const MessageId& instance, const Bytes& payload);

struct BrbLatency {
  Round broadcast_round = 0;
  std::size_t gamma = 0;  // first correct BR_deliver, inclusive round count
  std::size_t beta = 0;   // last correct BR_deliver, inclusive round count
  std::size_t delivered_by = 0;
};

/// Rounds from the first INIT send of `instance` to the first and last
/// br_deliver among correct miners; nullopt when no correct miner delivered.
std::optional<BrbLatency> measured_latency(const core::Trace& trace, const MessageId& instance);

/// All instances with at least one INIT send, in first-send order.
std::vector<MessageId> broadcast_instances(const core::Trace& trace);

}  // namespace strongchain::brb
