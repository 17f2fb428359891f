#include "strongchain/harness/scenario.hpp"

#include <fstream>
#include <set>

namespace strongchain::harness {

using nlohmann::json;

namespace {

/// Typed access to one JSON object with path-qualified errors.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ScenarioError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  template <class T>
  T get(const std::string& key) const {
    if (!has(key)) throw ScenarioError(at(key), "required field missing");
    return convert<T>(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? convert<T>(key) : fallback;
  }

  template <class T>
  std::optional<T> opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return convert<T>(key);
  }

  void reject_unknown(std::initializer_list<const char*> known) const {
    for (const auto& [key, value] : j_.items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok) throw ScenarioError(at(key), "unknown field");
    }
  }

 private:
  template <class T>
  T convert(const std::string& key) const {
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ScenarioError(at(key), "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ScenarioError(at(key), "expected a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ScenarioError(at(key), "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ScenarioError(at(key), "expected a string");
    }
    return v.get<T>();
  }

  const json& j_;
  std::string path_;
};

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& array_at(const Obj& o, const std::string& key) {
  const json& a = o.raw(key);
  if (!a.is_array()) throw ScenarioError(o.at(key), "expected an array");
  return a;
}

core::Bytes payload_of(const Obj& o, const std::string& key) {
  if (o.has(key + "_hex")) {
    try {
      return core::from_hex(o.get<std::string>(key + "_hex"));
    } catch (const std::exception& e) {
      throw ScenarioError(o.at(key + "_hex"), e.what());
    }
  }
  return core::to_bytes(o.get<std::string>(key));
}

ClientSpec parse_client(const json& j, const std::string& path) {
  Obj o(j, path);
  o.reject_unknown({"name", "workload", "reactive"});
  ClientSpec c;
  c.name = o.get<std::string>("name");
  if (o.has("workload")) {
    const json& arr = array_at(o, "workload");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj w(arr[i], idx(o.at("workload"), i));
      w.reject_unknown({"round", "payload", "payload_hex", "fee"});
      c.workload.push_back(chain::ScriptedTx{w.get<Round>("round"), payload_of(w, "payload"), w.get<std::uint64_t>("fee")});
    }
  }
  if (o.has("reactive")) {
    const json& arr = array_at(o, "reactive");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj r(arr[i], idx(o.at("reactive"), i));
      r.reject_unknown({"pattern", "payload", "payload_hex", "fee", "max_fires"});
      c.reactive.push_back(chain::ReactiveRule{r.get<std::string>("pattern", ""), payload_of(r, "payload"),
                                               r.get<std::uint64_t>("fee"), r.get<std::size_t>("max_fires", 1)});
    }
  }
  return c;
}

AttackConfig parse_attack(const json& j, const std::string& path) {
  Obj o(j, path);
  o.reject_unknown({"kind", "target", "fee_multiplier", "colluder", "filler_count", "max_launches"});
  AttackConfig a;
  try {
    a.kind = adversary::parse_attack_kind(o.get<std::string>("kind"));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(o.at("kind"), e.what());
  }
  if (o.has("target")) {
    Obj t(o.raw("target"), o.at("target"));
    t.reject_unknown({"client", "payload_prefix"});
    a.target_client = t.opt<std::string>("client");
    a.payload_prefix = t.opt<std::string>("payload_prefix");
  }
  a.fee_multiplier = o.get<std::uint64_t>("fee_multiplier", 10);
  if (a.fee_multiplier < 2) throw ScenarioError(o.at("fee_multiplier"), "must be at least 2");
  a.colluder = o.opt<std::string>("colluder");
  a.filler_count = o.get<std::size_t>("filler_count", 0);
  a.max_launches = o.get<std::size_t>("max_launches", 1);
  return a;
}

AdversarySpec parse_adversary(const json& j, const std::string& path) {
  Obj o(j, path);
  o.reject_unknown({"host", "miner", "name", "behavior", "attack"});
  AdversarySpec a;
  const std::string host = o.get<std::string>("host");
  if (host == "miner") {
    a.host = AdversaryHost::miner;
    a.miner = o.get<std::uint32_t>("miner");
  } else if (host == "client") {
    a.host = AdversaryHost::client;
    a.name = o.get<std::string>("name");
  } else {
    throw ScenarioError(o.at("host"), "expected \"miner\" or \"client\"");
  }
  const std::string behavior = o.get<std::string>("behavior", "attack");
  if (behavior == "attack") {
    a.behavior = AdversaryBehavior::attack;
  } else if (behavior == "halt") {
    a.behavior = AdversaryBehavior::halt;
  } else {
    throw ScenarioError(o.at("behavior"), "expected \"attack\" or \"halt\"");
  }
  if (o.has("attack")) a.attack = parse_attack(o.raw("attack"), o.at("attack"));
  if (a.behavior == AdversaryBehavior::attack && !a.attack) throw ScenarioError(o.at("attack"), "required for behavior \"attack\"");
  if (a.host == AdversaryHost::client && a.attack && a.attack->colluder) {
    throw ScenarioError(o.at("attack.colluder"), "only miner hosts forward to a colluder");
  }
  return a;
}

}  // namespace

std::size_t Scenario::byzantine_miner_budget() const {
  if (consensus == chain::ConsensusKind::round_robin_strong) return t == 0 ? 0 : t - 1;
  return t;
}

std::size_t Scenario::byzantine_miner_count() const {
  std::size_t count = 0;
  for (const auto& a : adversaries) count += a.host == AdversaryHost::miner ? 1 : 0;
  return count;
}

std::vector<std::pair<std::string, ProcessId>> Scenario::client_ids() const {
  std::vector<std::pair<std::string, ProcessId>> out;
  auto add = [&](const std::string& name) {
    out.emplace_back(name, ProcessId::client(static_cast<std::uint32_t>(n + 1 + out.size())));
  };
  for (const auto& c : clients) add(c.name);
  if (random_workload) {
    for (std::size_t i = 0; i < random_workload->clients; ++i) add("rand" + std::to_string(i));
  }
  for (const auto& a : adversaries) {
    if (a.host == AdversaryHost::client) add(a.name);
  }
  for (const auto& a : adversaries) {
    if (a.attack && a.attack->colluder) add(*a.attack->colluder);
  }
  return out;
}

ProcessId Scenario::client_id(const std::string& name) const {
  for (const auto& [n_, id] : client_ids()) {
    if (n_ == name) return id;
  }
  throw ScenarioError("", "unknown client '" + name + "'");
}

void validate(const Scenario& s) {
  if (s.schema != kScenarioSchema) throw ScenarioError("schema", "unsupported schema version " + std::to_string(s.schema));
  if (s.t == 0) throw ScenarioError("t", "must be at least 1");
  if (s.n != 3 * s.t + 1) {
    throw ScenarioError("n", "must equal 3t+1 (n=" + std::to_string(s.n) + ", t=" + std::to_string(s.t) + ")");
  }
  if (s.slot_rounds < 2) throw ScenarioError("slot_rounds", "must be at least 2");
  if (s.block_size_limit == 0) throw ScenarioError("block_size_limit", "must be positive");
  if (s.rounds > 100000) throw ScenarioError("rounds", "at most 100000");

  std::set<std::string> names;
  for (const auto& [name, id] : s.client_ids()) {
    if (name.empty()) throw ScenarioError("clients", "client names must be non-empty");
    if (!names.insert(name).second) throw ScenarioError("clients", "duplicate client name '" + name + "'");
  }

  std::set<std::uint32_t> miners;
  for (std::size_t i = 0; i < s.adversaries.size(); ++i) {
    const auto& a = s.adversaries[i];
    const std::string path = idx("adversaries", i);
    if (a.host == AdversaryHost::miner) {
      if (a.miner < 1 || a.miner > s.n) throw ScenarioError(path + ".miner", "miner index must be in 1..n");
      if (!miners.insert(a.miner).second) throw ScenarioError(path + ".miner", "miner listed twice");
    }
    if (a.attack && a.attack->target_client && !names.count(*a.attack->target_client)) {
      throw ScenarioError(path + ".attack.target.client", "unknown client '" + *a.attack->target_client + "'");
    }
  }
  if (s.byzantine_miner_count() > s.byzantine_miner_budget()) {
    throw ScenarioError("adversaries", std::to_string(s.byzantine_miner_count()) +
                                           " Byzantine miners exceed the budget of " +
                                           std::to_string(s.byzantine_miner_budget()) + " for " +
                                           chain::to_string(s.consensus));
  }
  if (s.random_workload) {
    const auto& r = *s.random_workload;
    if (r.rate < 0.0 || r.rate > 1.0) throw ScenarioError("random_workload.rate", "must be in [0, 1]");
    if (r.reactive_fraction < 0.0 || r.reactive_fraction > 1.0) {
      throw ScenarioError("random_workload.reactive_fraction", "must be in [0, 1]");
    }
    if (r.fee_min > r.fee_max) throw ScenarioError("random_workload.fee_min", "must not exceed fee_max");
  }
  try {
    (void)crypto::DlogGroup::named(s.group);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("group", e.what());
  }
}

Scenario parse_scenario(const json& j) {
  Obj o(j, "");
  o.reject_unknown({"schema", "name", "description", "n", "t", "rounds", "seed", "consensus", "backend", "group",
                    "slot_rounds", "block_size_limit", "clients", "random_workload", "adversaries", "expect"});
  Scenario s;
  s.schema = o.get<int>("schema");
  s.name = o.get<std::string>("name");
  s.t = o.get<std::size_t>("t");
  s.n = o.get<std::size_t>("n", 3 * s.t + 1);
  s.rounds = o.get<Round>("rounds");
  s.seed = o.get<std::uint64_t>("seed", 1);
  try {
    s.consensus = chain::parse_consensus(o.get<std::string>("consensus", "round_robin_strong"));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("consensus", e.what());
  }
  try {
    s.backend = crypto::parse_backend(o.get<std::string>("backend", "mock"));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("backend", e.what());
  }
  s.group = o.get<std::string>("group", std::string(crypto::kDefaultGroup));
  s.slot_rounds = o.get<Round>("slot_rounds", 16);
  s.block_size_limit = o.get<std::size_t>("block_size_limit", 8);

  if (o.has("clients")) {
    const json& arr = array_at(o, "clients");
    for (std::size_t i = 0; i < arr.size(); ++i) s.clients.push_back(parse_client(arr[i], idx("clients", i)));
  }
  if (o.has("random_workload")) {
    Obj r(o.raw("random_workload"), "random_workload");
    r.reject_unknown({"clients", "rate", "fee_min", "fee_max", "from_round", "until_round", "payload_bytes",
                      "reactive_fraction"});
    RandomWorkload w;
    w.clients = r.get<std::size_t>("clients");
    w.rate = r.get<double>("rate", w.rate);
    w.fee_min = r.get<std::uint64_t>("fee_min", w.fee_min);
    w.fee_max = r.get<std::uint64_t>("fee_max", w.fee_max);
    w.from_round = r.get<Round>("from_round", 0);
    w.until_round = r.get<Round>("until_round", s.rounds);
    w.payload_bytes = r.get<std::size_t>("payload_bytes", w.payload_bytes);
    w.reactive_fraction = r.get<double>("reactive_fraction", 0.0);
    s.random_workload = w;
  }
  if (o.has("adversaries")) {
    const json& arr = array_at(o, "adversaries");
    for (std::size_t i = 0; i < arr.size(); ++i) s.adversaries.push_back(parse_adversary(arr[i], idx("adversaries", i)));
  }
  if (o.has("expect")) {
    Obj e(o.raw("expect"), "expect");
    e.reject_unknown({"attack_success", "min_violations", "max_violations"});
    s.expect.attack_success = e.opt<bool>("attack_success");
    s.expect.min_violations = e.opt<std::size_t>("min_violations");
    s.expect.max_violations = e.opt<std::size_t>("max_violations");
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open scenario file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", path.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

json scenario_to_json(const Scenario& s) {
  auto tx_payload = [](json& j, const core::Bytes& p) {
    bool printable = std::all_of(p.begin(), p.end(), [](std::uint8_t c) { return c >= 0x20 && c < 0x7f; });
    if (printable) {
      j["payload"] = core::to_string(p);
    } else {
      j["payload_hex"] = core::to_hex(p);
    }
  };
  json j = {{"schema", s.schema},
            {"name", s.name},
            {"n", s.n},
            {"t", s.t},
            {"rounds", s.rounds},
            {"seed", s.seed},
            {"consensus", chain::to_string(s.consensus)},
            {"backend", crypto::to_string(s.backend)},
            {"group", s.group},
            {"slot_rounds", s.slot_rounds},
            {"block_size_limit", s.block_size_limit}};
  json clients = json::array();
  for (const auto& c : s.clients) {
    json cj = {{"name", c.name}, {"workload", json::array()}};
    for (const auto& w : c.workload) {
      json wj = {{"round", w.round}, {"fee", w.fee}};
      tx_payload(wj, w.payload);
      cj["workload"].push_back(wj);
    }
    if (!c.reactive.empty()) {
      cj["reactive"] = json::array();
      for (const auto& r : c.reactive) {
        json rj = {{"pattern", r.pattern}, {"fee", r.fee}, {"max_fires", r.max_fires}};
        tx_payload(rj, r.payload);
        cj["reactive"].push_back(rj);
      }
    }
    clients.push_back(cj);
  }
  j["clients"] = clients;
  if (s.random_workload) {
    const auto& r = *s.random_workload;
    j["random_workload"] = {{"clients", r.clients},         {"rate", r.rate},
                            {"fee_min", r.fee_min},         {"fee_max", r.fee_max},
                            {"from_round", r.from_round},   {"until_round", r.until_round},
                            {"payload_bytes", r.payload_bytes}, {"reactive_fraction", r.reactive_fraction}};
  }
  json adv = json::array();
  for (const auto& a : s.adversaries) {
    json aj;
    if (a.host == AdversaryHost::miner) {
      aj = {{"host", "miner"}, {"miner", a.miner}};
    } else {
      aj = {{"host", "client"}, {"name", a.name}};
    }
    aj["behavior"] = a.behavior == AdversaryBehavior::attack ? "attack" : "halt";
    if (a.attack) {
      const auto& c = *a.attack;
      json att = {{"kind", adversary::to_string(c.kind)},
                  {"fee_multiplier", c.fee_multiplier},
                  {"filler_count", c.filler_count},
                  {"max_launches", c.max_launches}};
      json target = json::object();
      if (c.target_client) target["client"] = *c.target_client;
      if (c.payload_prefix) target["payload_prefix"] = *c.payload_prefix;
      att["target"] = target;
      if (c.colluder) att["colluder"] = *c.colluder;
      aj["attack"] = att;
    }
    adv.push_back(aj);
  }
  j["adversaries"] = adv;
  json e = json::object();
  if (s.expect.attack_success) e["attack_success"] = *s.expect.attack_success;
  if (s.expect.min_violations) e["min_violations"] = *s.expect.min_violations;
  if (s.expect.max_violations) e["max_violations"] = *s.expect.max_violations;
  j["expect"] = e;
  return j;
}

Scenario apply(Scenario s, const Overrides& o) {
  if (o.t) {
    s.t = *o.t;
    if (!o.n) s.n = 3 * s.t + 1;
  }
  if (o.n) s.n = *o.n;
  if (o.seed) s.seed = *o.seed;
  if (o.rounds) s.rounds = *o.rounds;
  if (o.backend) s.backend = *o.backend;
  validate(s);
  return s;
}

}  // namespace strongchain::harness
