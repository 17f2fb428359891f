#include "strongchain/rounds/engine.hpp"

#include <algorithm>

namespace strongchain::rounds {

void Outbox::broadcast(Body body) { engine_.enqueue(self_, engine_.miners_, std::move(body)); }

void Outbox::broadcast_all(Body body) { engine_.enqueue(self_, engine_.everyone_, std::move(body)); }

void Outbox::send(ProcessId to, Body body) { engine_.enqueue(self_, {to}, std::move(body)); }

void Outbox::multicast(std::vector<ProcessId> to, Body body) { engine_.enqueue(self_, std::move(to), std::move(body)); }

void Outbox::record(TraceEvent ev) { engine_.record(self_, std::move(ev)); }

Round Outbox::round() const { return engine_.round_; }

const std::vector<ProcessId>& Outbox::miners() const { return engine_.miners_; }

const std::vector<ProcessId>& Outbox::clients() const { return engine_.clients_; }

RoundEngine::RoundEngine(EngineConfig config) : config_(config), rng_(config.seed) {}

void RoundEngine::add_process(ProcessId id, std::unique_ptr<Process> behavior) {
  if (started_) throw std::logic_error("processes must be added before the first round");
  if (!behavior) throw std::invalid_argument("null process behavior");
  if (slots_.count(id)) throw std::invalid_argument("duplicate process " + id.str());
  for (const auto& [other, slot] : slots_) {
    if (other.index == id.index) throw std::invalid_argument("process index reused: " + id.str());
  }
  slots_.emplace(id, Slot{std::move(behavior), {}, 0, false});
  auto& group = id.is_miner() ? miners_ : clients_;
  group.insert(std::upper_bound(group.begin(), group.end(), id), id);
  everyone_.insert(std::upper_bound(everyone_.begin(), everyone_.end(), id), id);
}

void RoundEngine::byzantine_hook(ProcessId id, std::unique_ptr<Process> strategy) {
  auto it = slots_.find(id);
  if (it == slots_.end()) throw std::out_of_range("unknown process " + id.str());
  if (!strategy) throw std::invalid_argument("null strategy");
  Slot& slot = it->second;
  if (id.is_miner() && !slot.byzantine) {
    std::size_t count = 0;
    for (const auto& [pid, s] : slots_) count += (pid.is_miner() && s.byzantine) ? 1 : 0;
    if (count + 1 > config_.byzantine_miner_budget) {
      throw ByzantineBudgetExceeded("installing " + id.str() + " would make " + std::to_string(count + 1) +
                                    " Byzantine miners; budget is " + std::to_string(config_.byzantine_miner_budget));
    }
  }
  slot.behavior = std::move(strategy);
  slot.outgoing.clear();
  slot.byzantine = true;
}

std::vector<ProcessId> RoundEngine::byzantine() const {
  std::vector<ProcessId> out;
  for (const auto& [pid, slot] : slots_) {
    if (slot.byzantine) out.push_back(pid);
  }
  return out;
}

bool RoundEngine::is_byzantine(ProcessId id) const {
  auto it = slots_.find(id);
  return it != slots_.end() && it->second.byzantine;
}

Process& RoundEngine::process(ProcessId id) {
  auto it = slots_.find(id);
  if (it == slots_.end()) throw std::out_of_range("unknown process " + id.str());
  return *it->second.behavior;
}

void RoundEngine::enqueue(ProcessId from, std::vector<ProcessId> to, Body body) {
  for (const auto& dest : to) {
    if (!slots_.count(dest)) throw std::out_of_range("send to unknown process " + dest.str());
  }
  slots_.at(from).outgoing.push_back(Pending{std::move(to), std::make_shared<const Body>(std::move(body))});
}

void RoundEngine::record(ProcessId process, TraceEvent ev) {
  ev.round = round_;
  ev.seq = seq_++;
  ev.process = process;
  trace_.push_back(std::move(ev));
}

RoundReport RoundEngine::step() {
  started_ = true;
  RoundReport report{round_, 0, 0};

  for (auto& [pid, slot] : slots_) {
    Outbox out(*this, pid);
    slot.behavior->on_round_start(round_, out);
  }

  std::map<ProcessId, std::vector<Envelope>> inbox;
  for (auto& [pid, slot] : slots_) {
    while (!slot.outgoing.empty()) {
      Pending msg = std::move(slot.outgoing.front());
      slot.outgoing.pop_front();
      MessageId id{pid, std::to_string(slot.next_label++)};

      TraceEvent ev;
      ev.kind = core::EventKind::send;
      ev.message = id;
      ev.tag = core::tag_of(*msg.body);
      ev.instance = core::instance_of(*msg.body);
      ev.fanout = static_cast<std::uint32_t>(msg.to.size());
      record(pid, std::move(ev));
      ++report.messages_sent;

      for (const auto& dest : msg.to) inbox[dest].push_back(Envelope{id, pid, dest, msg.body});
    }
  }

  for (auto& [pid, slot] : slots_) {
    auto it = inbox.find(pid);
    if (it == inbox.end()) continue;
    for (const auto& env : it->second) {
      TraceEvent ev;
      ev.kind = core::EventKind::deliver;
      ev.message = env.id;
      ev.tag = core::tag_of(env.payload());
      ev.instance = core::instance_of(env.payload());
      record(pid, std::move(ev));
      ++report.envelopes_delivered;
      Outbox out(*this, pid);
      slot.behavior->on_deliver(round_, env, out);
    }
  }

  for (auto& [pid, slot] : slots_) {
    Outbox out(*this, pid);
    slot.behavior->on_round_end(round_, out);
  }

  ++round_;
  return report;
}

const std::vector<TraceEvent>& RoundEngine::run(Round max_rounds) {
  for (Round i = 0; i < max_rounds; ++i) step();
  return trace_;
}

}  // namespace strongchain::rounds
