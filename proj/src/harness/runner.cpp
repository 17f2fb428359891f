#include "strongchain/harness/runner.hpp"

#include <atomic>
#include <memory>
#include <random>
#include <thread>

#include "strongchain/rounds/engine.hpp"

namespace strongchain::harness {

namespace {

std::string random_text(std::mt19937_64& rng, std::size_t len) {
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlphabet) - 2);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += kAlphabet[pick(rng)];
  return s;
}

core::Bytes bytes_of(const std::string& s) { return core::Bytes(s.begin(), s.end()); }

/// Scripts and reactive rules for the generated clients, seeded by the run seed.
std::vector<ClientSpec> generate_workload(const RandomWorkload& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::bernoulli_distribution send(w.rate);
  std::bernoulli_distribution reacts(w.reactive_fraction);
  std::uniform_int_distribution<std::uint64_t> fee(w.fee_min, w.fee_max);
  std::vector<ClientSpec> out(w.clients);
  for (std::size_t i = 0; i < w.clients; ++i) {
    out[i].name = "rand" + std::to_string(i);
    if (reacts(rng)) {
      out[i].reactive.push_back(chain::ReactiveRule{"rand", bytes_of("react" + std::to_string(i) + ":" + random_text(rng, 6)),
                                                    fee(rng), 1});
    }
  }
  for (Round r = w.from_round; r < w.until_round; ++r) {
    for (std::size_t i = 0; i < w.clients; ++i) {
      if (!send(rng)) continue;
      std::string prefix = "rand" + std::to_string(i) + ":";
      std::size_t extra = w.payload_bytes > prefix.size() ? w.payload_bytes - prefix.size() : 1;
      out[i].workload.push_back(chain::ScriptedTx{r, bytes_of(prefix + random_text(rng, extra)), fee(rng)});
    }
  }
  return out;
}

adversary::AttackStrategy strategy_for(const Scenario& s, const AttackConfig& a) {
  adversary::AttackStrategy st;
  st.kind = a.kind;
  if (a.target_client) st.target.client = s.client_id(*a.target_client);
  if (a.payload_prefix) st.target.payload_prefix = *a.payload_prefix;
  st.fee_multiplier = a.fee_multiplier;
  if (a.colluder) st.colluder = s.client_id(*a.colluder);
  st.filler_count = a.filler_count;
  st.max_launches = a.max_launches;
  return st;
}

}  // namespace

Report evaluate(const core::Trace& trace, const Expectations* expect) {
  Report r = build_report(trace);
  if (expect) add_expectations(r, *expect);
  return r;
}

RunResult run_scenario(const Scenario& s) {
  validate(s);
  const bool strong = s.consensus == chain::ConsensusKind::round_robin_strong;
  const auto plug = chain::ConsensusPlug::make(s.consensus, s.n, s.t, s.slot_rounds, s.block_size_limit);
  const auto keys = crypto::generate(s.backend, s.n, s.k(), s.seed, s.group);
  const crypto::PublicKey* pk = strong ? &keys.pk : nullptr;
  const crypto::VerificationKey* vk = strong ? &keys.vk : nullptr;
  auto sk = [&](std::uint32_t i) -> const crypto::SecretKeyShare* { return strong ? &keys.sk[i - 1] : nullptr; };

  rounds::RoundEngine engine(rounds::EngineConfig{s.seed, s.byzantine_miner_budget()});
  std::map<ProcessId, const chain::MinerNode*> correct_miners;
  std::vector<ProcessId> byzantine;

  for (std::uint32_t i = 1; i <= s.n; ++i) {
    auto node = std::make_unique<chain::MinerNode>(ProcessId::miner(i), plug, vk, sk(i));
    correct_miners.emplace(ProcessId::miner(i), node.get());
    engine.add_process(ProcessId::miner(i), std::move(node));
  }

  std::vector<ClientSpec> clients = s.clients;
  if (s.random_workload) {
    auto gen = generate_workload(*s.random_workload, s.seed);
    clients.insert(clients.end(), gen.begin(), gen.end());
  }
  for (const auto& c : clients) {
    const ProcessId id = s.client_id(c.name);
    engine.add_process(id, std::make_unique<chain::ClientNode>(id, plug, pk, c.workload, c.reactive));
  }

  // Byzantine clients get a placeholder first so the hook marks them.
  auto install = [&](ProcessId id, std::unique_ptr<rounds::Process> p, bool fresh) {
    if (fresh) engine.add_process(id, std::make_unique<rounds::HaltStrategy>());
    try {
      engine.byzantine_hook(id, std::move(p));
    } catch (const rounds::ByzantineBudgetExceeded& e) {
      throw ScenarioError("adversaries", e.what());
    }
    byzantine.push_back(id);
  };
  for (const auto& a : s.adversaries) {
    if (a.host != AdversaryHost::client) continue;
    const ProcessId id = s.client_id(a.name);
    std::unique_ptr<rounds::Process> p;
    if (a.behavior == AdversaryBehavior::halt || !a.attack) {
      p = std::make_unique<rounds::HaltStrategy>();
    } else {
      p = std::make_unique<adversary::AttackingClient>(id, plug, pk, strategy_for(s, *a.attack));
    }
    install(id, std::move(p), true);
  }
  for (const auto& a : s.adversaries) {
    if (a.host != AdversaryHost::miner) continue;
    const ProcessId id = ProcessId::miner(a.miner);
    correct_miners.erase(id);
    std::unique_ptr<rounds::Process> p;
    if (a.behavior == AdversaryBehavior::halt || !a.attack) {
      p = std::make_unique<rounds::HaltStrategy>();
    } else {
      p = std::make_unique<adversary::AttackingMiner>(id, plug, vk, sk(a.miner), pk, strategy_for(s, *a.attack));
    }
    install(id, std::move(p), false);
    if (a.attack && a.attack->colluder) {
      const ProcessId cid = s.client_id(*a.attack->colluder);
      install(cid, std::make_unique<adversary::AttackingClient>(cid, plug, pk, strategy_for(s, *a.attack), id), true);
    }
  }

  RunResult res;
  res.scenario = s;
  for (Round r = 0; r < s.rounds; ++r) {
    engine.step();
    for (const auto& [id, node] : correct_miners) res.live_digests[r][id] = node->bcb().mempool_digest();
  }

  auto& meta = res.trace.meta;
  meta.scenario = s.name;
  meta.seed = s.seed;
  meta.n = s.n;
  meta.t = s.t;
  meta.k = s.k();
  meta.digest = "sha256";
  meta.backend = crypto::to_string(s.backend);
  meta.consensus = chain::to_string(s.consensus);
  meta.rounds = s.rounds;
  meta.slot_rounds = s.slot_rounds;
  meta.block_size_limit = s.block_size_limit;
  for (std::uint32_t i = 1; i <= s.n; ++i) meta.miners.push_back(ProcessId::miner(i));
  for (const auto& [name, id] : s.client_ids()) meta.clients.push_back(id);
  std::sort(byzantine.begin(), byzantine.end());
  meta.byzantine = byzantine;
  res.trace.events = engine.trace();

  res.report = evaluate(res.trace, &s.expect);
  const bool same = res.live_digests == res.report.mempool_digests;
  std::size_t mismatched = 0;
  for (const auto& [r, per] : res.live_digests) {
    auto it = res.report.mempool_digests.find(r);
    mismatched += (it == res.report.mempool_digests.end() || it->second != per) ? 1 : 0;
  }
  res.report.checks.push_back(Check{"mempool.replay_matches_live", true, same,
                                    std::to_string(mismatched) + " rounds where live state differs from the replay"});
  return res;
}

std::vector<SweepRow> sweep(const Scenario& s, std::uint64_t first, std::uint64_t last, unsigned threads) {
  if (last < first) throw std::invalid_argument("empty seed range");
  const std::size_t count = last - first + 1;
  std::vector<SweepRow> rows(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      SweepRow& row = rows[i];
      row.seed = first + i;
      try {
        Overrides o;
        o.seed = row.seed;
        RunResult res = run_scenario(apply(s, o));
        const Report& rep = res.report;
        row.ok = rep.ok();
        row.violations = rep.violations.size();
        row.attacks = rep.attacks.size();
        for (const auto& a : rep.attacks) row.attack_successes += a.success.value_or(false) ? 1 : 0;
        row.chain_height = rep.tree.depth();
        for (const auto* c : rep.failures()) row.failed_checks.push_back(c->name);
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

nlohmann::json sweep_to_json(const Scenario& s, const std::vector<SweepRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t passed = 0;
  for (const auto& r : rows) {
    passed += r.ok ? 1 : 0;
    nlohmann::json row = {{"seed", r.seed},
                          {"ok", r.ok},
                          {"violations", r.violations},
                          {"attacks", r.attacks},
                          {"attack_successes", r.attack_successes},
                          {"chain_height", r.chain_height},
                          {"failed_checks", r.failed_checks}};
    if (!r.error.empty()) row["error"] = r.error;
    arr.push_back(row);
  }
  return {{"scenario", s.name}, {"runs", rows.size()}, {"passed", passed}, {"rows", arr}};
}

}  // namespace strongchain::harness
