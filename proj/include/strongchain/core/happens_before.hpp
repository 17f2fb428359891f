#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "strongchain/core/trace.hpp"

namespace strongchain::core {

class CausalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Happens-before over wire messages, built from an engine trace.
///
/// Direct edges: when process p sends m', every message p delivered since its
/// previous send, and that previous send itself, precede m'. Together with
/// transitivity this is exactly the closure of the three message rules
/// (per-sender order, sent-or-delivered-before-send, transitivity). Message
/// indices follow send order, so every edge points from a lower index to a
/// higher one and the relation is acyclic by construction.
class HappensBefore {
 public:
  /// Consumes send/deliver events in engine order; other kinds are skipped.
  /// Throws CausalityError on a deliver whose message was never sent.
  void insert(std::span<const TraceEvent> events);

  bool contains(const MessageId& m) const { return index_.count(m) != 0; }
  std::size_t size() const { return ids_.size(); }
  std::size_t edge_count() const;

  /// m1 → m2. Irreflexive. Throws std::out_of_range for unknown messages.
  bool precedes(const MessageId& m1, const MessageId& m2) const;
  std::vector<MessageId> direct_predecessors(const MessageId& m) const;

  /// For every target, membership of each tracked message in its causal past:
  /// result[i][j] == precedes(tracked[j], targets[i]).
  std::vector<std::vector<bool>> past_membership(std::span<const MessageId> tracked,
                                                 std::span<const MessageId> targets) const;

 private:
  struct ProcessFrontier {
    std::optional<std::size_t> last_send;
    std::vector<std::size_t> delivered_since;
  };

  std::size_t index_of(const MessageId& m) const;

  std::vector<MessageId> ids_;
  std::map<MessageId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> preds_;
  std::map<ProcessId, ProcessFrontier> frontier_;
};

HappensBefore hb_insert(HappensBefore hb, std::span<const TraceEvent> events);

/// t1 → t2 iff the messages carrying them are hb-related. Throws
/// std::out_of_range when either txid has no envelope.
bool hb_tx(const HappensBefore& hb, const Digest& t1, const Digest& t2, const std::map<Digest, MessageId>& envelope);

}  // namespace strongchain::core
