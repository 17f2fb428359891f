#include <doctest.h>

#include "support.hpp"

using namespace strongchain;
using namespace strongchain::core;

namespace {

class Echoer : public rounds::Process {
 public:
  std::vector<std::pair<Round, rounds::Envelope>> got;
  bool reply = false;
  void on_round_start(Round r, rounds::Outbox& out) override {
    if (r == 0) out.broadcast(NoteMessage{"hello from " + out.self().str()});
  }
  void on_deliver(Round r, const rounds::Envelope& env, rounds::Outbox& out) override {
    got.emplace_back(r, env);
    if (reply && r == 0) out.send(env.from, NoteMessage{"ack"});
  }
};

}  // namespace

TEST_CASE("four miners broadcasting once give 16 deliveries in FIFO order") {
  rounds::RoundEngine engine;
  std::vector<Echoer*> nodes;
  for (std::uint32_t i = 1; i <= 4; ++i) {
    auto p = std::make_unique<Echoer>();
    nodes.push_back(p.get());
    engine.add_process(ProcessId::miner(i), std::move(p));
  }
  const auto rep = engine.step();
  CHECK(rep.messages_sent == 4);
  CHECK(rep.envelopes_delivered == 16);
  for (auto* n : nodes) {
    REQUIRE(n->got.size() == 4);
    for (std::uint32_t i = 0; i < 4; ++i) CHECK(n->got[i].second.from == ProcessId::miner(i + 1));
  }
  // seq strictly increases; every deliver follows its send.
  std::uint64_t prev = 0;
  bool first = true;
  for (const auto& ev : engine.trace()) {
    if (!first) CHECK(ev.seq > prev);
    prev = ev.seq;
    first = false;
  }
}

TEST_CASE("sends made while handling deliveries leave next round") {
  rounds::RoundEngine engine;
  auto a = std::make_unique<Echoer>();
  auto b = std::make_unique<Echoer>();
  b->reply = true;
  auto* pa = a.get();
  engine.add_process(ProcessId::miner(1), std::move(a));
  engine.add_process(ProcessId::miner(2), std::move(b));
  engine.step();
  const std::size_t after0 = pa->got.size();
  CHECK(after0 == 2);
  engine.step();
  REQUIRE(pa->got.size() == 3);
  CHECK(pa->got.back().first == 1);
  CHECK(std::get<NoteMessage>(pa->got.back().second.payload()).text == "ack");
}

TEST_CASE("labels are per-sender counters") {
  rounds::RoundEngine engine;
  for (std::uint32_t i = 1; i <= 2; ++i) engine.add_process(ProcessId::miner(i), std::make_unique<Echoer>());
  engine.run(1);
  std::set<MessageId> ids;
  for (const auto& ev : engine.trace()) {
    if (ev.kind == EventKind::send) ids.insert(*ev.message);
  }
  CHECK(ids == std::set<MessageId>{{ProcessId::miner(1), "0"}, {ProcessId::miner(2), "0"}});
}

TEST_CASE("runs are deterministic") {
  auto once = [] {
    rounds::RoundEngine engine({42, 0});
    for (std::uint32_t i = 1; i <= 4; ++i) engine.add_process(ProcessId::miner(i), std::make_unique<Echoer>());
    engine.add_process(ProcessId::client(5), std::make_unique<Echoer>());
    return engine.run(3);
  };
  CHECK(once() == once());
}

TEST_CASE("engine guards registration and the Byzantine budget") {
  rounds::RoundEngine engine({0, 1});
  engine.add_process(ProcessId::miner(1), std::make_unique<Echoer>());
  engine.add_process(ProcessId::miner(2), std::make_unique<Echoer>());
  engine.add_process(ProcessId::client(3), std::make_unique<Echoer>());
  CHECK_THROWS_AS(engine.add_process(ProcessId::miner(1), std::make_unique<Echoer>()), std::invalid_argument);
  CHECK_THROWS_AS(engine.add_process(ProcessId::client(2), std::make_unique<Echoer>()), std::invalid_argument);
  engine.byzantine_hook(ProcessId::miner(1), std::make_unique<rounds::HaltStrategy>());
  engine.byzantine_hook(ProcessId::client(3), std::make_unique<rounds::HaltStrategy>());
  CHECK_THROWS_AS(engine.byzantine_hook(ProcessId::miner(2), std::make_unique<rounds::HaltStrategy>()),
                  rounds::ByzantineBudgetExceeded);
  CHECK(engine.is_byzantine(ProcessId::miner(1)));
  CHECK(engine.byzantine().size() == 2);
  engine.step();
  CHECK_THROWS_AS(engine.add_process(ProcessId::miner(4), std::make_unique<Echoer>()), std::logic_error);
}
