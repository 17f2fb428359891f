#pragma once

#include <deque>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "strongchain/core/trace.hpp"
#include "strongchain/core/wire.hpp"

namespace strongchain::rounds {

using core::Body;
using core::MessageId;
using core::ProcessId;
using core::Round;
using core::TraceEvent;

/// Message-latency and processor-speed bounds of the synchronous model both
/// collapse to one round in the lock-step abstraction.
inline constexpr Round kMessageDelayBound = 1;
inline constexpr Round kSpeedRatioBound = 1;

/// One delivered copy of a message. `from` is stamped by the engine.
struct Envelope {
  MessageId id;
  ProcessId from;
  ProcessId to;
  std::shared_ptr<const Body> body;

  const Body& payload() const { return *body; }
};

class RoundEngine;

/// A process's handle on its outgoing queue Q_s. Messages enqueued during
/// on_round_start go out in the same round; anything enqueued while handling
/// deliveries or at round end goes out at the start of the next round.
class Outbox {
 public:
  /// To every miner, as one message.
  void broadcast(Body body);
  /// To every miner and every client.
  void broadcast_all(Body body);
  void send(ProcessId to, Body body);
  void multicast(std::vector<ProcessId> to, Body body);

  /// Appends a protocol event to the trace; round, seq and process are stamped
  /// by the engine and any caller-supplied values are overwritten.
  void record(TraceEvent ev);

  ProcessId self() const { return self_; }
  Round round() const;
  const std::vector<ProcessId>& miners() const;
  const std::vector<ProcessId>& clients() const;

 private:
  friend class RoundEngine;
  Outbox(RoundEngine& engine, ProcessId self) : engine_(engine), self_(self) {}

  RoundEngine& engine_;
  ProcessId self_;
};

class Process {
 public:
  virtual ~Process() = default;
  virtual void on_round_start(Round /*round*/, Outbox& /*out*/) {}
  virtual void on_deliver(Round round, const Envelope& env, Outbox& out) = 0;
  virtual void on_round_end(Round /*round*/, Outbox& /*out*/) {}
};

/// Crash: ignores everything and never sends.
class HaltStrategy final : public Process {
 public:
  void on_deliver(Round, const Envelope&, Outbox&) override {}
};

class ByzantineBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoundReport {
  Round round = 0;
  std::size_t messages_sent = 0;
  std::size_t envelopes_delivered = 0;
};

struct EngineConfig {
  std::uint64_t seed = 0;
  std::size_t byzantine_miner_budget = 0;
};

/// Deterministic lock-step engine. Per round:
///   1. on_round_start for every process (ascending ProcessId);
///   2. every Q_s is drained in FIFO order, each message gets an engine id and
///      is appended to each destination's Q_d;
///   3. each Q_d is delivered in FIFO order, which is ascending (sender, send
///      sequence) because senders are drained in ProcessId order;
///   4. on_round_end for every process; the round counter advances.
class RoundEngine {
 public:
  explicit RoundEngine(EngineConfig config = {});

  /// Processes must be registered before the first step.
  void add_process(ProcessId id, std::unique_ptr<Process> behavior);

  /// Replaces a process's behavior with an adversarial one. Miners count against
  /// the Byzantine budget (clients are unbounded); pending sends of the replaced
  /// behavior are discarded. Throws ByzantineBudgetExceeded / std::out_of_range.
  void byzantine_hook(ProcessId id, std::unique_ptr<Process> strategy);

  RoundReport step();
  /// Exactly max_rounds steps; returns the whole trace so far.
  const std::vector<TraceEvent>& run(Round max_rounds);

  Round round() const { return round_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  std::vector<TraceEvent> take_trace() { return std::move(trace_); }

  const std::vector<ProcessId>& miners() const { return miners_; }
  const std::vector<ProcessId>& clients() const { return clients_; }
  std::vector<ProcessId> byzantine() const;
  bool is_byzantine(ProcessId id) const;
  const EngineConfig& config() const { return config_; }

  Process& process(ProcessId id);
  template <class T>
  T* process_as(ProcessId id) {
    return dynamic_cast<T*>(&process(id));
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  friend class Outbox;

  struct Pending {
    std::vector<ProcessId> to;
    std::shared_ptr<const Body> body;
  };
  struct Slot {
    std::unique_ptr<Process> behavior;
    std::deque<Pending> outgoing;
    std::uint64_t next_label = 0;
    bool byzantine = false;
  };

  void enqueue(ProcessId from, std::vector<ProcessId> to, Body body);
  void record(ProcessId process, TraceEvent ev);

  EngineConfig config_;
  std::mt19937_64 rng_;
  Round round_ = 0;
  std::uint64_t seq_ = 0;
  bool started_ = false;
  std::map<ProcessId, Slot> slots_;
  std::vector<ProcessId> miners_;
  std::vector<ProcessId> clients_;
  std::vector<ProcessId> everyone_;
  std::vector<TraceEvent> trace_;
};

}  // namespace strongchain::rounds
