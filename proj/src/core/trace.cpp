#include "strongchain/core/trace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "strongchain/core/json.hpp"

namespace strongchain::core {

using nlohmann::json;

namespace {

constexpr std::string_view kEventNames[] = {"send", "deliver", "br_deliver", "bc_deliver", "block_commit",
                                            "attack_launch"};

json digests_json(const std::vector<Digest>& ds) {
  json arr = json::array();
  for (const auto& d : ds) arr.push_back(d.hex());
  return arr;
}

std::vector<Digest> digests_from_json(const json& j) {
  std::vector<Digest> out;
  for (const auto& d : j) out.push_back(Digest::from_hex(d.get<std::string>()));
  return out;
}

json pids_json(const std::vector<ProcessId>& ps) {
  json arr = json::array();
  for (const auto& p : ps) arr.push_back(p.str());
  return arr;
}

std::vector<ProcessId> pids_from_json(const json& j) {
  std::vector<ProcessId> out;
  for (const auto& p : j) out.push_back(ProcessId::parse(p.get<std::string>()));
  return out;
}

json event_json(const TraceEvent& ev) {
  json j = {{"round", ev.round}, {"seq", ev.seq}, {"process", ev.process.str()}, {"kind", to_string(ev.kind)}};
  if (ev.message) j["message"] = ev.message->str();
  if (!ev.tag.empty()) j["tag"] = ev.tag;
  if (ev.instance) j["instance"] = ev.instance->str();
  if (ev.kind == EventKind::send) j["fanout"] = ev.fanout;
  if (ev.tx) j["tx"] = tx_to_json(*ev.tx);
  if (ev.block) {
    j["block"] = {{"hash", ev.block->hash.hex()},
                  {"parent", ev.block->parent.hex()},
                  {"height", ev.block->height},
                  {"proposer", ev.block->proposer.str()},
                  {"txids", digests_json(ev.block->txids)}};
  }
  if (ev.attack) {
    j["attack"] = {{"kind", ev.attack->kind},
                   {"victim", ev.attack->victim.hex()},
                   {"injected", digests_json(ev.attack->injected)}};
  }
  return j;
}

TraceEvent event_from(const json& j) {
  TraceEvent ev;
  ev.round = j.at("round").get<Round>();
  ev.seq = j.at("seq").get<std::uint64_t>();
  ev.process = ProcessId::parse(j.at("process").get<std::string>());
  ev.kind = parse_event_kind(j.at("kind").get<std::string>());
  if (j.contains("message")) ev.message = MessageId::parse(j.at("message").get<std::string>());
  if (j.contains("tag")) ev.tag = j.at("tag").get<std::string>();
  if (j.contains("instance")) ev.instance = MessageId::parse(j.at("instance").get<std::string>());
  if (j.contains("fanout")) ev.fanout = j.at("fanout").get<std::uint32_t>();
  if (j.contains("tx")) ev.tx = tx_from_json(j.at("tx"));
  if (j.contains("block")) {
    const auto& b = j.at("block");
    ev.block = BlockHeader{Digest::from_hex(b.at("hash").get<std::string>()),
                           Digest::from_hex(b.at("parent").get<std::string>()), b.at("height").get<std::uint64_t>(),
                           ProcessId::parse(b.at("proposer").get<std::string>()), digests_from_json(b.at("txids"))};
  }
  if (j.contains("attack")) {
    const auto& a = j.at("attack");
    ev.attack = AttackRecord{a.at("kind").get<std::string>(), Digest::from_hex(a.at("victim").get<std::string>()),
                             digests_from_json(a.at("injected"))};
  }
  return ev;
}

}  // namespace

json tx_to_json(const Transaction& tx) {
  return {{"txid", tx.txid.hex()},
          {"client", tx.client.str()},
          {"nonce", tx.nonce},
          {"payload", to_hex(tx.payload)},
          {"fee", tx.fee}};
}

Transaction tx_from_json(const json& j) {
  Transaction tx = Transaction::make(ProcessId::parse(j.at("client").get<std::string>()), j.at("nonce").get<std::uint64_t>(),
                                     from_hex(j.at("payload").get<std::string>()), j.at("fee").get<std::uint64_t>());
  if (j.contains("txid") && Digest::from_hex(j.at("txid").get<std::string>()) != tx.txid) {
    throw DecodeError("transaction txid does not match its fields");
  }
  return tx;
}

std::string to_string(EventKind kind) { return std::string(kEventNames[static_cast<std::size_t>(kind)]); }

EventKind parse_event_kind(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kEventNames); ++i) {
    if (kEventNames[i] == s) return static_cast<EventKind>(i);
  }
  throw DecodeError("unknown event kind: " + std::string(s));
}

bool TraceMeta::is_byzantine(const ProcessId& p) const {
  return std::find(byzantine.begin(), byzantine.end(), p) != byzantine.end();
}

std::vector<ProcessId> TraceMeta::correct_miners() const {
  std::vector<ProcessId> out;
  for (const auto& m : miners) {
    if (!is_byzantine(m)) out.push_back(m);
  }
  return out;
}

std::string event_to_json(const TraceEvent& ev) { return event_json(ev).dump(); }

TraceEvent event_from_json(std::string_view line) {
  try {
    return event_from(json::parse(line));
  } catch (const json::exception& e) {
    throw DecodeError(std::string("bad trace event: ") + e.what());
  }
}

void write_jsonl(std::ostream& out, const Trace& trace) {
  const auto& m = trace.meta;
  json meta = {{"type", "meta"},
               {"scenario", m.scenario},
               {"seed", m.seed},
               {"n", m.n},
               {"t", m.t},
               {"k", m.k},
               {"digest", m.digest},
               {"backend", m.backend},
               {"consensus", m.consensus},
               {"rounds", m.rounds},
               {"slot_rounds", m.slot_rounds},
               {"block_size_limit", m.block_size_limit},
               {"miners", pids_json(m.miners)},
               {"clients", pids_json(m.clients)},
               {"byzantine", pids_json(m.byzantine)}};
  out << meta.dump() << '\n';
  for (const auto& ev : trace.events) out << event_json(ev).dump() << '\n';
}

Trace read_jsonl(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      if (j.contains("type") && j.at("type") == "meta") {
        auto& m = trace.meta;
        m.scenario = j.value("scenario", "");
        m.seed = j.value("seed", std::uint64_t{0});
        m.n = j.at("n").get<std::size_t>();
        m.t = j.at("t").get<std::size_t>();
        m.k = j.value("k", std::size_t{0});
        m.digest = j.value("digest", "sha256");
        m.backend = j.value("backend", "");
        m.consensus = j.value("consensus", "");
        m.rounds = j.value("rounds", Round{0});
        m.slot_rounds = j.value("slot_rounds", Round{0});
        m.block_size_limit = j.value("block_size_limit", std::size_t{0});
        m.miners = pids_from_json(j.at("miners"));
        m.clients = pids_from_json(j.value("clients", json::array()));
        m.byzantine = pids_from_json(j.value("byzantine", json::array()));
        have_meta = true;
      } else {
        trace.events.push_back(event_from(j));
      }
    } catch (const std::exception& e) {
      throw DecodeError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_meta) throw DecodeError("trace has no meta record");
  return trace;
}

}  // namespace strongchain::core
