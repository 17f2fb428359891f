#include "strongchain/brb/brb.hpp"

#include <algorithm>
#include <stdexcept>

#include "strongchain/core/hash.hpp"

namespace strongchain::brb {

BrbConfig BrbConfig::make(std::size_t n, std::size_t t) {
  if (n < 3 * t + 1) {
    throw std::invalid_argument("BRB needs n >= 3t+1 miners (n=" + std::to_string(n) + ", t=" + std::to_string(t) + ")");
  }
  return BrbConfig{n, t};
}

core::BrbMessage make_phase(core::BrbPhase phase, const MessageId& instance, const Bytes& payload) {
  core::BrbMessage m;
  m.phase = phase;
  m.instance = instance;
  m.digest = core::sha256(payload);
  if (phase != core::BrbPhase::ready) m.payload = payload;
  return m;
}

void br_broadcast(rounds::Outbox& out, const MessageId& instance, Bytes payload) {
  out.broadcast(make_phase(core::BrbPhase::init, instance, payload));
}

bool BrbEndpoint::delivered(const MessageId& instance) const {
  auto it = instances_.find(instance);
  return it != instances_.end() && it->second.delivered;
}

bool BrbEndpoint::echoed(const MessageId& instance) const {
  auto it = instances_.find(instance);
  return it != instances_.end() && it->second.echoed;
}

bool BrbEndpoint::readied(const MessageId& instance) const {
  auto it = instances_.find(instance);
  return it != instances_.end() && it->second.readied;
}

std::optional<BrbDelivery> BrbEndpoint::on_message(const ProcessId& from, const core::BrbMessage& msg,
                                                   rounds::Outbox& out) {
  using core::BrbPhase;
  if (msg.phase != BrbPhase::init && !from.is_miner()) return std::nullopt;
  if (msg.phase != BrbPhase::ready && core::sha256(msg.payload) != msg.digest) return std::nullopt;

  Instance& inst = instances_[msg.instance];
  const Digest& d = msg.digest;
  if (msg.phase != BrbPhase::ready) inst.bodies.emplace(d, msg.payload);

  switch (msg.phase) {
    case BrbPhase::init:
      // Only the instance owner may start it.
      if (from != msg.instance.sender || inst.seen_init) return std::nullopt;
      inst.seen_init = true;
      if (!inst.echoed) {
        inst.echoed = true;
        out.broadcast(make_phase(BrbPhase::echo, msg.instance, msg.payload));
      }
      break;
    case BrbPhase::echo: {
      auto& voters = inst.echoes[d];
      voters.insert(from);
      if (voters.size() >= config_.echo_threshold() && !inst.readied) {
        inst.readied = true;
        out.broadcast(make_phase(BrbPhase::ready, msg.instance, inst.bodies.at(d)));
      }
      break;
    }
    case BrbPhase::ready: {
      auto& voters = inst.readies[d];
      voters.insert(from);
      if (voters.size() >= config_.ready_threshold_send() && !inst.readied) {
        inst.readied = true;
        core::BrbMessage ready;
        ready.phase = BrbPhase::ready;
        ready.instance = msg.instance;
        ready.digest = d;
        out.broadcast(std::move(ready));
      }
      break;
    }
  }
  return try_deliver(msg.instance, inst, d);
}

std::optional<BrbDelivery> BrbEndpoint::try_deliver(const MessageId& id, Instance& inst, const Digest& d) {
  if (inst.delivered) return std::nullopt;
  auto r = inst.readies.find(d);
  if (r == inst.readies.end() || r->second.size() < config_.ready_threshold_deliver()) return std::nullopt;
  auto body = inst.bodies.find(d);
  if (body == inst.bodies.end()) return std::nullopt;  // READY quorum before any ECHO with the body
  inst.delivered = true;
  return BrbDelivery{id, d, body->second};
}

std::vector<MessageId> broadcast_instances(const core::Trace& trace) {
  std::vector<MessageId> out;
  std::set<MessageId> seen;
  for (const auto& ev : trace.events) {
    if (ev.kind == core::EventKind::send && ev.tag == "INIT" && ev.instance && seen.insert(*ev.instance).second) {
      out.push_back(*ev.instance);
    }
  }
  return out;
}

std::optional<BrbLatency> measured_latency(const core::Trace& trace, const MessageId& instance) {
  std::optional<Round> start;
  std::optional<Round> first;
  Round last = 0;
  std::size_t count = 0;
  for (const auto& ev : trace.events) {
    if (!ev.instance || *ev.instance != instance) continue;
    if (ev.kind == core::EventKind::send && ev.tag == "INIT" && !start) start = ev.round;
    if (ev.kind == core::EventKind::br_deliver && ev.process.is_miner() && !trace.meta.is_byzantine(ev.process)) {
      if (!first) first = ev.round;
      last = std::max(last, ev.round);
      ++count;
    }
  }
  if (!start || !first) return std::nullopt;
  return BrbLatency{*start, static_cast<std::size_t>(*first - *start + 1), static_cast<std::size_t>(last - *start + 1),
                    count};
}

}  // namespace strongchain::brb
