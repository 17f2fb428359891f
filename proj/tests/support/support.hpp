#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "strongchain/brb/brb.hpp"
#include "strongchain/core/hash.hpp"
#include "strongchain/rounds/engine.hpp"

namespace testsupport {

using namespace strongchain;
using core::Bytes;
using core::Digest;
using core::MessageId;
using core::ProcessId;
using core::Round;

inline Bytes bytes(std::string_view s) { return core::to_bytes(s); }

inline core::BrbMessage phase(core::BrbPhase p, const MessageId& inst, const Bytes& payload) {
  return brb::make_phase(p, inst, payload);
}

/// BRB-only correct miner: delivers and records br_deliver, nothing else.
class BrbMiner : public rounds::Process {
 public:
  explicit BrbMiner(brb::BrbConfig c) : ep_(c) {}

  void on_deliver(Round, const rounds::Envelope& env, rounds::Outbox& out) override {
    if (const auto* m = std::get_if<core::BrbMessage>(&env.payload())) {
      if (auto d = ep_.on_message(env.from, *m, out)) {
        core::TraceEvent ev;
        ev.kind = core::EventKind::br_deliver;
        ev.instance = d->instance;
        out.record(std::move(ev));
        delivered.emplace(d->instance, d->payload);
      }
    }
  }

  const brb::BrbEndpoint& endpoint() const { return ep_; }
  std::map<MessageId, Bytes> delivered;

 private:
  brb::BrbEndpoint ep_;
};

/// Sends exactly what it is told, in on_round_start of the given round.
class Scripted : public rounds::Process {
 public:
  struct Action {
    Round round;
    std::vector<ProcessId> to;  // empty: every miner
    core::Body body;
  };

  explicit Scripted(std::vector<Action> actions) : actions_(std::move(actions)) {}

  void on_round_start(Round r, rounds::Outbox& out) override {
    for (const auto& a : actions_) {
      if (a.round != r) continue;
      if (a.to.empty()) {
        out.broadcast(a.body);
      } else {
        out.multicast(a.to, a.body);
      }
    }
  }
  void on_deliver(Round, const rounds::Envelope&, rounds::Outbox&) override {}

 private:
  std::vector<Action> actions_;
};

inline std::vector<ProcessId> miners(std::initializer_list<std::uint32_t> ids) {
  std::vector<ProcessId> out;
  for (auto i : ids) out.push_back(ProcessId::miner(i));
  return out;
}

/// n BRB miners (Byzantine ones replaced by the given scripts) plus scripted
/// clients, run for `rounds`. Byzantine budget is t.
inline core::Trace run_brb(std::size_t n, std::size_t t, std::map<ProcessId, std::vector<Scripted::Action>> byzantine,
                           std::map<ProcessId, std::vector<Scripted::Action>> clients, Round rounds,
                           std::set<ProcessId> correct_clients = {}) {
  const auto cfg = brb::BrbConfig::make(n, t);
  rounds::RoundEngine engine({0, t});
  core::Trace trace;
  for (std::uint32_t i = 1; i <= n; ++i) {
    const auto id = ProcessId::miner(i);
    engine.add_process(id, std::make_unique<BrbMiner>(cfg));
    trace.meta.miners.push_back(id);
  }
  for (auto& [id, actions] : clients) {
    engine.add_process(id, std::make_unique<Scripted>(actions));
    trace.meta.clients.push_back(id);
    if (!correct_clients.count(id)) trace.meta.byzantine.push_back(id);
  }
  for (auto& [id, actions] : byzantine) {
    engine.byzantine_hook(id, std::make_unique<Scripted>(actions));
    trace.meta.byzantine.push_back(id);
  }
  std::sort(trace.meta.byzantine.begin(), trace.meta.byzantine.end());
  engine.run(rounds);
  trace.meta.n = n;
  trace.meta.t = t;
  trace.meta.rounds = rounds;
  trace.events = engine.take_trace();
  return trace;
}

/// Independent BRB property check over a trace. Payload agreement is checked
/// by the caller via BrbMiner::delivered.
struct BrbVerdict {
  bool validity = true;     // every delivered instance was broadcast by its sender
  bool agreement = true;    // one correct delivery implies all (given 2 spare rounds)
  bool integrity = true;    // at most one delivery per miner per instance
  bool termination = true;  // correct sender: all correct miners deliver
  bool beta_lt_2gamma = true;
  std::map<MessageId, std::pair<std::size_t, std::size_t>> gamma_beta;
  std::map<MessageId, std::set<ProcessId>> delivered_by;
};

inline BrbVerdict check_brb(const core::Trace& trace) {
  BrbVerdict v;
  const auto correct = trace.meta.correct_miners();
  const std::set<ProcessId> correct_set(correct.begin(), correct.end());
  std::map<MessageId, Round> init;
  std::map<MessageId, std::map<ProcessId, std::vector<Round>>> del;
  Round last = trace.meta.rounds ? trace.meta.rounds - 1 : 0;
  for (const auto& ev : trace.events) {
    if (ev.kind == core::EventKind::send && ev.tag == "INIT" && ev.instance && ev.process == ev.instance->sender) {
      init.emplace(*ev.instance, ev.round);
    }
    if (ev.kind == core::EventKind::br_deliver && correct_set.count(ev.process)) {
      del[*ev.instance][ev.process].push_back(ev.round);
    }
  }
  for (const auto& [inst, per] : del) {
    if (!init.count(inst)) v.validity = false;
    Round first = ~Round{0}, lastd = 0;
    for (const auto& [p, rs] : per) {
      if (rs.size() != 1) v.integrity = false;
      first = std::min(first, rs.front());
      lastd = std::max(lastd, rs.front());
      v.delivered_by[inst].insert(p);
    }
    if (first + 2 <= last && per.size() != correct.size()) v.agreement = false;
    if (init.count(inst)) {
      const std::size_t gamma = first - init.at(inst) + 1;
      const std::size_t beta = lastd - init.at(inst) + 1;
      v.gamma_beta[inst] = {gamma, beta};
      if (beta >= 2 * gamma) v.beta_lt_2gamma = false;
    }
  }
  for (const auto& [inst, r] : init) {
    if (trace.meta.is_byzantine(inst.sender) || r + 3 > last) continue;
    if (!del.count(inst) || del.at(inst).size() != correct.size()) v.termination = false;
  }
  return v;
}

/// Brute-force happens-before straight from the three message rules, closed
/// with Warshall. Meant for small traces.
inline std::set<std::pair<MessageId, MessageId>> brute_force_hb(const std::vector<core::TraceEvent>& events) {
  std::vector<MessageId> ids;
  std::map<MessageId, std::size_t> idx;
  for (const auto& ev : events) {
    if (ev.kind == core::EventKind::send) {
      idx[*ev.message] = ids.size();
      ids.push_back(*ev.message);
    }
  }
  const std::size_t m = ids.size();
  std::vector<std::vector<bool>> rel(m, std::vector<bool>(m, false));
  std::map<ProcessId, std::vector<std::size_t>> seen;  // sent or delivered so far, per process
  for (const auto& ev : events) {
    if (ev.kind != core::EventKind::send && ev.kind != core::EventKind::deliver) continue;
    const std::size_t j = idx.at(*ev.message);
    if (ev.kind == core::EventKind::send) {
      for (std::size_t i : seen[ev.process]) rel[i][j] = true;
    }
    seen[ev.process].push_back(j);
  }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      if (rel[i][k])
        for (std::size_t j = 0; j < m; ++j)
          if (rel[k][j]) rel[i][j] = true;
  std::set<std::pair<MessageId, MessageId>> out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (rel[i][j]) out.emplace(ids[i], ids[j]);
  return out;
}

}  // namespace testsupport
