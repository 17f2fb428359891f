#include <doctest.h>

#include "support.hpp"

using namespace testsupport;
using core::BrbPhase;

namespace {

const ProcessId kClient = ProcessId::client(20);
const MessageId kInst{kClient, "tx:0"};

Scripted::Action send(Round r, std::vector<ProcessId> to, BrbPhase p, const std::string& body,
                      const MessageId& inst = kInst) {
  return {r, std::move(to), phase(p, inst, bytes(body))};
}


/// Re-runs with access to the miner objects to compare delivered payloads.
struct Outcome {
  core::Trace trace;
  BrbVerdict verdict;
  std::map<ProcessId, std::map<MessageId, Bytes>> payloads;
};

Outcome run(std::size_t n, std::size_t t, std::map<ProcessId, std::vector<Scripted::Action>> byz,
            std::vector<Scripted::Action> client, bool client_correct, Round rounds = 8) {
  const auto cfg = brb::BrbConfig::make(n, t);
  rounds::RoundEngine engine({0, t});
  Outcome o;
  std::map<ProcessId, BrbMiner*> live;
  for (std::uint32_t i = 1; i <= n; ++i) {
    auto m = std::make_unique<BrbMiner>(cfg);
    live[ProcessId::miner(i)] = m.get();
    engine.add_process(ProcessId::miner(i), std::move(m));
    o.trace.meta.miners.push_back(ProcessId::miner(i));
  }
  engine.add_process(kClient, std::make_unique<Scripted>(client));
  o.trace.meta.clients.push_back(kClient);
  if (!client_correct) o.trace.meta.byzantine.push_back(kClient);
  for (auto& [id, actions] : byz) {
    engine.byzantine_hook(id, std::make_unique<Scripted>(actions));
    live.erase(id);
    o.trace.meta.byzantine.push_back(id);
  }
  std::sort(o.trace.meta.byzantine.begin(), o.trace.meta.byzantine.end());
  engine.run(rounds);
  o.trace.meta.n = n;
  o.trace.meta.t = t;
  o.trace.meta.rounds = rounds;
  o.trace.events = engine.take_trace();
  o.verdict = check_brb(o.trace);
  for (auto& [id, m] : live) o.payloads[id] = m->delivered;
  return o;
}

void require_all_properties(const Outcome& o) {
  CHECK(o.verdict.validity);
  CHECK(o.verdict.agreement);
  CHECK(o.verdict.integrity);
  CHECK(o.verdict.termination);
  CHECK(o.verdict.beta_lt_2gamma);
  std::set<Bytes> bodies;
  for (const auto& [id, d] : o.payloads) {
    auto it = d.find(kInst);
    if (it != d.end()) bodies.insert(it->second);
  }
  CHECK(bodies.size() <= 1);
}

std::size_t deliveries(const Outcome& o) {
  std::size_t c = 0;
  for (const auto& [id, d] : o.payloads) c += d.count(kInst);
  return c;
}

}  // namespace

TEST_CASE("quorum sizes and configuration bounds") {
  const auto c = brb::BrbConfig::make(7, 2);
  CHECK(c.echo_threshold() == 5);
  CHECK(c.ready_threshold_send() == 3);
  CHECK(c.ready_threshold_deliver() == 5);
  CHECK_THROWS_AS(brb::BrbConfig::make(6, 2), std::invalid_argument);
  CHECK_NOTHROW(brb::BrbConfig::make(10, 2));
}

TEST_CASE("correct sender: every correct miner delivers in exactly three rounds") {
  for (auto [n, t] : {std::pair<std::size_t, std::size_t>{4, 1}, {7, 2}}) {
    auto o = run(n, t, {}, {send(1, {}, BrbPhase::init, "v")}, true);
    require_all_properties(o);
    CHECK(deliveries(o) == n);
    CHECK(o.verdict.gamma_beta.at(kInst) == std::pair<std::size_t, std::size_t>{3, 3});
    CHECK(brb::measured_latency(o.trace, kInst)->gamma == 3);
    CHECK(brb::broadcast_instances(o.trace) == std::vector<MessageId>{kInst});
  }
}

TEST_CASE("partial INIT below the echo quorum delivers nowhere") {
  auto o = run(4, 1, {}, {send(0, miners({1, 2}), BrbPhase::init, "v")}, false);
  require_all_properties(o);
  CHECK(deliveries(o) == 0);
}

TEST_CASE("partial INIT at the echo quorum delivers everywhere") {
  auto o = run(7, 2, {}, {send(0, miners({1, 2, 3, 4, 5}), BrbPhase::init, "v")}, false);
  require_all_properties(o);
  CHECK(deliveries(o) == 7);
}

TEST_CASE("equivocating sender with a Byzantine echoer: agreement on one body") {
  // Client sends A to m1,m2 and B to m3,m4; m4 echoes A to m1,m2 and B to m3.
  std::map<ProcessId, std::vector<Scripted::Action>> byz{
      {ProcessId::miner(4),
       {send(1, miners({1, 2}), BrbPhase::echo, "A"), send(1, miners({3}), BrbPhase::echo, "B"),
        send(2, miners({1, 2, 3}), BrbPhase::ready, "A")}}};
  auto o = run(4, 1, byz,
               {send(0, miners({1, 2}), BrbPhase::init, "A"), send(0, miners({3, 4}), BrbPhase::init, "B")}, false);
  require_all_properties(o);
  CHECK(deliveries(o) == 3);
  CHECK(o.payloads.at(ProcessId::miner(3)).at(kInst) == bytes("A"));
}

TEST_CASE("equivocation without help delivers nowhere") {
  auto o = run(4, 1, {},
               {send(0, miners({1, 2}), BrbPhase::init, "A"), send(0, miners({3, 4}), BrbPhase::init, "B")}, false);
  require_all_properties(o);
  CHECK(deliveries(o) == 0);
}

TEST_CASE("withheld READY from a Byzantine miner does not block delivery") {
  for (auto [n, t] : {std::pair<std::size_t, std::size_t>{4, 1}, {7, 2}}) {
    std::map<ProcessId, std::vector<Scripted::Action>> byz;
    for (std::uint32_t i = 1; i <= t; ++i) byz[ProcessId::miner(i)] = {send(1, {}, BrbPhase::echo, "v")};
    auto o = run(n, t, byz, {send(0, {}, BrbPhase::init, "v")}, true);
    require_all_properties(o);
    CHECK(deliveries(o) == n - t);
    CHECK(o.verdict.gamma_beta.at(kInst).first == 3);
  }
}

TEST_CASE("silent Byzantine miners up to t do not block delivery") {
  std::map<ProcessId, std::vector<Scripted::Action>> byz{{ProcessId::miner(6), {}}, {ProcessId::miner(7), {}}};
  auto o = run(7, 2, byz, {send(0, {}, BrbPhase::init, "v")}, true);
  require_all_properties(o);
  CHECK(deliveries(o) == 5);
}

TEST_CASE("selective echo and ready skew delivery by one round; beta stays below 2 gamma") {
  // INIT reaches m2..m5 only; Byzantine m1 completes their echo and ready
  // quorums while m6, m7 catch up through READY amplification.
  std::map<ProcessId, std::vector<Scripted::Action>> byz{
      {ProcessId::miner(1),
       {send(1, miners({2, 3, 4, 5}), BrbPhase::echo, "v"), send(2, miners({2, 3, 4, 5}), BrbPhase::ready, "v")}}};
  auto o = run(7, 2, byz, {send(0, miners({2, 3, 4, 5}), BrbPhase::init, "v")}, false);
  require_all_properties(o);
  CHECK(deliveries(o) == 6);
  CHECK(o.verdict.gamma_beta.at(kInst) == std::pair<std::size_t, std::size_t>{3, 4});
}

TEST_CASE("forged phases are dropped") {
  SUBCASE("INIT from someone other than the instance sender") {
    std::map<ProcessId, std::vector<Scripted::Action>> byz{{ProcessId::miner(4), {send(0, {}, BrbPhase::init, "v")}}};
    auto o = run(4, 1, byz, {}, false);
    CHECK(deliveries(o) == 0);
  }
  SUBCASE("ECHO and READY from a client") {
    auto o = run(4, 1, {}, {send(0, {}, BrbPhase::echo, "v"), send(0, {}, BrbPhase::ready, "v")}, false);
    CHECK(deliveries(o) == 0);
  }
  SUBCASE("ECHO whose digest does not match its payload") {
    auto bad = phase(BrbPhase::echo, kInst, bytes("v"));
    bad.payload = bytes("w");
    std::map<ProcessId, std::vector<Scripted::Action>> byz{{ProcessId::miner(4), {{1, {}, bad}}}};
    auto o = run(4, 1, byz, {send(0, miners({1, 2}), BrbPhase::init, "v")}, false);
    CHECK(deliveries(o) == 0);
  }
  SUBCASE("READY storm for a body nobody echoed") {
    std::map<ProcessId, std::vector<Scripted::Action>> byz{
        {ProcessId::miner(4), {send(0, {}, BrbPhase::ready, "x"), send(1, {}, BrbPhase::ready, "x")}}};
    auto o = run(4, 1, byz, {}, false);
    CHECK(deliveries(o) == 0);
    require_all_properties(o);
  }
}

TEST_CASE("repeated phases from one miner count once") {
  std::vector<Scripted::Action> spam;
  for (Round r = 1; r < 4; ++r) spam.push_back(send(r, {}, BrbPhase::ready, "v"));
  std::map<ProcessId, std::vector<Scripted::Action>> byz{{ProcessId::miner(4), spam}};
  auto o = run(4, 1, byz, {send(0, miners({1}), BrbPhase::init, "v")}, false);
  // One echo and one (repeated) ready never reach any quorum.
  CHECK(deliveries(o) == 0);
  require_all_properties(o);
}
