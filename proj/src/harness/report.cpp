#include "strongchain/harness/report.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "strongchain/bcb/bcb.hpp"
#include "strongchain/core/json.hpp"

namespace strongchain::harness {

using core::EventKind;
using core::ProcessId;
using core::TraceEvent;
using nlohmann::json;

namespace {

std::string short_hex(const Digest& d) { return d.hex().substr(0, 12); }

Round last_round_of(const core::Trace& trace) {
  Round last = trace.meta.rounds > 0 ? trace.meta.rounds - 1 : 0;
  for (const auto& ev : trace.events) last = std::max(last, ev.round);
  return last;
}

/// Per-miner mempool replay shared by the digest, causal-past and fairness views.
struct MinerReplay {
  std::map<Round, Digest> digest;
  std::map<Round, std::size_t> pool_size;
  std::map<Digest, Round> delivered;
  std::map<Digest, Round> committed;
  std::map<Digest, std::vector<Digest>> causal_past;
};

MinerReplay replay_miner(const std::vector<const TraceEvent*>& events, Round last_round) {
  MinerReplay out;
  std::map<Digest, core::MempoolEntry> pool;
  std::set<Digest> recorded;
  core::CausalSnapshot snapshot;
  std::size_t i = 0;
  for (Round r = 0; r <= last_round; ++r) {
    bool changed = false;
    for (; i < events.size() && events[i]->round == r; ++i) {
      const TraceEvent& ev = *events[i];
      if (ev.kind == EventKind::bc_deliver && ev.tx) {
        const Digest& id = ev.tx->txid;
        if (pool.count(id) || recorded.count(id)) continue;
        pool.emplace(id, core::MempoolEntry{*ev.tx, r, snapshot});
        out.delivered.emplace(id, r);
        out.causal_past.emplace(id, snapshot.txids());
        changed = true;
      } else if (ev.kind == EventKind::block_commit && ev.block) {
        for (const auto& id : ev.block->txids) {
          recorded.insert(id);
          pool.erase(id);
          out.committed.emplace(id, r);
        }
        changed = true;
      }
    }
    out.digest[r] = bcb::mempool_digest(pool);
    out.pool_size[r] = pool.size();
    if (changed || r == 0) {
      std::vector<Digest> known(recorded.begin(), recorded.end());
      for (const auto& [id, e] : pool) known.push_back(id);
      snapshot = core::CausalSnapshot(r, std::move(known));
    }
  }
  return out;
}

std::map<ProcessId, std::vector<const TraceEvent*>> events_by_correct_miner(const core::Trace& trace) {
  std::map<ProcessId, std::vector<const TraceEvent*>> out;
  for (const auto& m : trace.meta.correct_miners()) out[m];
  for (const auto& ev : trace.events) {
    if (ev.kind != EventKind::bc_deliver && ev.kind != EventKind::block_commit) continue;
    auto it = out.find(ev.process);
    if (it != out.end()) it->second.push_back(&ev);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::size_t limit = 5) {
  std::string out;
  for (std::size_t i = 0; i < parts.size() && i < limit; ++i) out += (i ? ", " : "") + parts[i];
  if (parts.size() > limit) out += ", ... (" + std::to_string(parts.size()) + " total)";
  return out;
}

}  // namespace

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.asserted || c.passed; });
}

std::vector<const Check*> Report::failures() const {
  std::vector<const Check*> out;
  for (const auto& c : checks) {
    if (c.asserted && !c.passed) out.push_back(&c);
  }
  return out;
}

std::size_t expected_envelopes(std::size_t n, bool encrypted) { return (encrypted ? 3 : 2) * n * n + n; }

std::map<Round, std::map<ProcessId, Digest>> replay_mempool_digests(const core::Trace& trace) {
  const Round last = last_round_of(trace);
  std::map<Round, std::map<ProcessId, Digest>> out;
  if (trace.meta.rounds == 0) return out;
  for (const auto& [miner, events] : events_by_correct_miner(trace)) {
    for (const auto& [r, d] : replay_miner(events, last).digest) out[r][miner] = d;
  }
  return out;
}

std::map<ProcessId, std::map<Digest, std::vector<Digest>>> replay_causal_pasts(const core::Trace& trace) {
  const Round last = last_round_of(trace);
  std::map<ProcessId, std::map<Digest, std::vector<Digest>>> out;
  for (const auto& [miner, events] : events_by_correct_miner(trace)) out[miner] = replay_miner(events, last).causal_past;
  return out;
}

std::map<Digest, MessageId> envelope_map(const core::Trace& trace) {
  std::map<MessageId, MessageId> init;
  for (const auto& ev : trace.events) {
    if (ev.kind == EventKind::send && ev.tag == "INIT" && ev.instance && ev.message && ev.process == ev.instance->sender) {
      init.emplace(*ev.instance, *ev.message);
    }
  }
  std::map<Digest, MessageId> out;
  for (const auto& ev : trace.events) {
    if (ev.kind != EventKind::bc_deliver || !ev.tx || !ev.instance) continue;
    auto it = init.find(*ev.instance);
    if (it != init.end()) out.emplace(ev.tx->txid, it->second);
  }
  return out;
}

std::vector<chain::Violation> detect_violations(const core::Trace& trace, const core::BlockTree& tree) {
  core::HappensBefore hb;
  hb.insert(trace.events);
  return chain::find_order_violations(tree, hb, envelope_map(trace));
}

core::BlockTree reconstruct_chain(const core::Trace& trace, const ProcessId& miner) {
  std::map<Digest, core::Transaction> bodies;
  for (const auto& ev : trace.events) {
    if (ev.kind == EventKind::bc_deliver && ev.tx) bodies.emplace(ev.tx->txid, *ev.tx);
  }
  core::BlockTree tree;
  for (const auto& ev : trace.events) {
    if (ev.kind != EventKind::block_commit || !ev.block || ev.process != miner) continue;
    const auto& h = *ev.block;
    std::vector<core::Transaction> txs;
    for (const auto& id : h.txids) {
      auto it = bodies.find(id);
      if (it == bodies.end()) throw std::runtime_error("committed transaction " + id.hex() + " never delivered");
      txs.push_back(it->second);
    }
    core::Block b = core::Block::make(h.parent, h.height, h.proposer, std::move(txs));
    if (b.hash != h.hash) throw core::InvalidBlock("block " + h.hash.hex() + " does not match its header");
    tree.add(std::move(b));
  }
  return tree;
}

Report build_report(const core::Trace& trace) {
  Report rep;
  rep.meta = trace.meta;
  const auto& meta = trace.meta;
  const Round last = rep.last_round = last_round_of(trace);
  const bool strong = meta.consensus == "round_robin_strong";
  const auto correct = meta.correct_miners();
  const bool has_rounds = meta.rounds > 0;
  auto add = [&](std::string name, bool asserted, bool passed, std::string detail) {
    rep.checks.push_back(Check{std::move(name), asserted, passed, std::move(detail)});
  };

  // ---- mempools (replay) ----------------------------------------
  auto by_miner = events_by_correct_miner(trace);
  std::map<ProcessId, MinerReplay> replays;
  if (has_rounds) {
    for (const auto& [m, evs] : by_miner) replays.emplace(m, replay_miner(evs, last));
  }
  for (const auto& [m, rp] : replays) {
    for (const auto& [r, d] : rp.digest) rep.mempool_digests[r][m] = d;
  }
  for (const auto& [r, per] : rep.mempool_digests) {
    std::set<Digest> distinct;
    for (const auto& [m, d] : per) distinct.insert(d);
    if (distinct.size() > 1) rep.disagreeing_rounds.push_back(r);
  }
  add("mempool.agreement", true, rep.disagreeing_rounds.empty(),
      std::to_string(rep.mempool_digests.size()) + " rounds, " + std::to_string(rep.disagreeing_rounds.size()) +
          " disagreeing" +
          (rep.disagreeing_rounds.empty() ? "" : " (first round " + std::to_string(rep.disagreeing_rounds.front()) + ")"));

  // ---- chain ---------------------------------------------------------------
  bool chain_ok = !correct.empty();
  if (!correct.empty()) {
    rep.reference_miner = correct.front();
    try {
      rep.tree = reconstruct_chain(trace, rep.reference_miner);
      if (!core::consensus_chain(rep.tree)) throw core::NoConsensusChain();
    } catch (const std::exception& e) {
      chain_ok = false;
      rep.chain_error = e.what();
    }
    std::vector<core::BlockHeader> ref;
    std::map<ProcessId, std::vector<core::BlockHeader>> headers;
    for (const auto& ev : trace.events) {
      if (ev.kind == EventKind::block_commit && ev.block) headers[ev.process].push_back(*ev.block);
    }
    for (const auto& m : correct) rep.chain_identical = rep.chain_identical && headers[m] == headers[correct.front()];
  } else {
    rep.chain_error = "no correct miners";
  }
  add("chain.reconstructs", true, chain_ok, chain_ok ? "height " + std::to_string(rep.tree.depth()) : rep.chain_error);
  add("chain.identical", true, rep.chain_identical, std::to_string(correct.size()) + " correct miners");

  // ---- BRB instances and message counts ------------------------------------
  std::map<MessageId, Round> init_round;
  std::map<MessageId, std::map<ProcessId, std::vector<Round>>> br;
  std::map<MessageId, std::size_t> envelopes;
  std::map<MessageId, std::map<ProcessId, std::pair<Round, Digest>>> bc;
  std::vector<MessageId> order;
  for (const auto& ev : trace.events) {
    if (ev.kind == EventKind::deliver) ++rep.total_envelopes;
    if (!ev.instance) continue;
    const MessageId& inst = *ev.instance;
    switch (ev.kind) {
      case EventKind::send:
        if (ev.tag == "INIT" && ev.process == inst.sender && !init_round.count(inst)) {
          init_round.emplace(inst, ev.round);
          order.push_back(inst);
        }
        break;
      case EventKind::deliver:
        if (ev.tag == "INIT" || ev.tag == "ECHO" || ev.tag == "READY" || ev.tag == "SHARE") ++envelopes[inst];
        break;
      case EventKind::br_deliver:
        if (ev.process.is_miner() && !meta.is_byzantine(ev.process)) br[inst][ev.process].push_back(ev.round);
        break;
      case EventKind::bc_deliver:
        if (ev.tx && ev.process.is_miner() && !meta.is_byzantine(ev.process)) {
          bc[inst].emplace(ev.process, std::make_pair(ev.round, ev.tx->txid));
        }
        break;
      default: break;
    }
  }

  std::vector<std::string> integrity, validity, agreement, termination, beta_bad, count_bad;
  const std::size_t expected = expected_envelopes(meta.n, strong);
  const Round share_phase = strong ? 3 : 2;
  const bool all_miners_correct = std::none_of(meta.byzantine.begin(), meta.byzantine.end(),
                                           [](const ProcessId& p) { return p.is_miner(); });
  for (const auto& [inst, per] : br) {
    if (!init_round.count(inst)) validity.push_back(inst.str());
    for (const auto& [m, rounds] : per) {
      if (rounds.size() > 1) integrity.push_back(inst.str() + "@" + m.str());
    }
  }
  for (const auto& inst : order) {
    InstanceStats st;
    st.instance = inst;
    st.correct_sender = !meta.is_byzantine(inst.sender);
    st.broadcast_round = init_round.at(inst);
    st.envelopes = envelopes[inst];
    const auto& per = br[inst];
    if (!per.empty()) {
      Round first = ~Round{0};
      Round lastd = 0;
      for (const auto& [m, rounds] : per) {
        first = std::min(first, rounds.front());
        lastd = std::max(lastd, rounds.front());
      }
      st.latency = brb::BrbLatency{st.broadcast_round, static_cast<std::size_t>(first - st.broadcast_round + 1),
                                   static_cast<std::size_t>(lastd - st.broadcast_round + 1), per.size()};
      if (st.latency->beta >= 2 * st.latency->gamma) beta_bad.push_back(inst.str());
      if (first + 2 <= last && per.size() != correct.size()) agreement.push_back(inst.str());
    }
    if (st.correct_sender && st.broadcast_round + 2 <= last) {
      bool all = per.size() == correct.size();
      for (const auto& [m, rounds] : per) all = all && rounds.front() == st.broadcast_round + 2;
      if (!all) termination.push_back(inst.str());
    }
    auto bit = bc.find(inst);
    if (bit != bc.end()) {
      std::set<Digest> ids;
      for (const auto& [m, rd] : bit->second) ids.insert(rd.second);
      if (ids.size() > 1) agreement.push_back(inst.str() + " (content)");
      st.txid = *ids.begin();
    }
    if (st.correct_sender && st.broadcast_round + share_phase <= last && st.envelopes != expected) {
      count_bad.push_back(inst.str() + "=" + std::to_string(st.envelopes));
    }
    rep.instances.push_back(std::move(st));
  }
  add("brb.integrity", true, integrity.empty(), integrity.empty() ? "at most one delivery per miner" : join(integrity));
  add("brb.validity", true, validity.empty(), validity.empty() ? "every delivery has a broadcast" : join(validity));
  add("brb.agreement", true, agreement.empty(), agreement.empty() ? "all correct miners agree" : join(agreement));
  add("brb.termination", true, termination.empty(),
      termination.empty() ? "correct senders delivered in exactly 3 rounds" : join(termination));
  add("brb.beta_lt_2gamma", true, beta_bad.empty(), beta_bad.empty() ? "holds for every delivered instance" : join(beta_bad));
  add("messages.per_broadcast", all_miners_correct, count_bad.empty(),
      "expected " + std::to_string(expected) + (count_bad.empty() ? "" : "; got " + join(count_bad)));

  // ---- liveness ------------------------------------------------------------
  std::vector<std::string> late_beta, late_gamma;
  for (const auto& st : rep.instances) {
    if (!st.correct_sender || !st.instance.sender.is_client()) continue;
    TxLiveness lv;
    lv.instance = st.instance;
    lv.broadcast_round = st.broadcast_round;
    lv.beta = st.latency ? st.latency->beta : kLockstepGamma;
    const Round beta_deadline = st.broadcast_round + lv.beta + 1;
    const Round gamma_deadline = st.broadcast_round + kLockstepGamma + 1;
    auto bit = bc.find(st.instance);
    const std::size_t arrived = bit == bc.end() ? 0 : bit->second.size();
    if (st.txid) lv.txid = *st.txid;
    if (arrived == correct.size() && arrived > 0) {
      Round lr = 0;
      for (const auto& [m, rd] : bit->second) lr = std::max(lr, rd.first);
      lv.last_arrival = lr;
      lv.within_beta = lr <= beta_deadline;
      lv.within_gamma = lr <= gamma_deadline;
    } else {
      lv.within_beta = last < beta_deadline;
      lv.within_gamma = last < gamma_deadline;
    }
    if (!lv.within_beta) late_beta.push_back(st.instance.str());
    if (!lv.within_gamma) late_gamma.push_back(st.instance.str());
    rep.liveness.push_back(std::move(lv));
  }
  add("liveness.beta", true, late_beta.empty(),
      std::to_string(rep.liveness.size()) + " correct-client transactions" + (late_beta.empty() ? "" : "; late: " + join(late_beta)));
  add("liveness.gamma", true, late_gamma.empty(),
      "bound r+" + std::to_string(kLockstepGamma + 1) + (late_gamma.empty() ? "" : "; late: " + join(late_gamma)));

  // ---- causal violations ---------------------------------------------------
  bool hb_ok = true;
  if (chain_ok) {
    try {
      rep.violations = detect_violations(trace, rep.tree);
    } catch (const std::exception& e) {
      hb_ok = false;
      add("trace.causality", true, false, e.what());
    }
  }
  if (hb_ok) add("trace.causality", true, true, "happens-before well defined");
  {
    std::vector<std::string> v;
    for (const auto& [a, b] : rep.violations) v.push_back(short_hex(a) + "->" + short_hex(b));
    add("safety.no_violations", strong, v.empty(), v.empty() ? "no causal violations" : join(v));
    add("safety.strong_blockchain", strong, chain_ok && hb_ok && rep.violations.empty(),
        chain_ok ? "consensus chain extends happens-before" : rep.chain_error);
  }

  // ---- attacks -------------------------------------------------------------
  std::vector<std::string> strong_success, unexplained;
  for (auto& a : adversary::attack_instances(trace)) {
    AttackOutcome o;
    o.attack = a;
    if (chain_ok) o.success = adversary::attack_success(trace, rep.tree, a);
    std::set<Digest> involved(a.injected.begin(), a.injected.end());
    involved.insert(a.victim);
    o.coincides_with_violation = std::any_of(rep.violations.begin(), rep.violations.end(), [&](const chain::Violation& v) {
      return involved.count(v.first) && involved.count(v.second);
    });
    const std::string label = adversary::to_string(a.kind) + " by " + a.host.str();
    if (o.success.value_or(false)) {
      strong_success.push_back(label);
      if (!o.coincides_with_violation) unexplained.push_back(label);
    }
    rep.attacks.push_back(std::move(o));
  }
  if (strong) {
    add("attacks.all_failed", true, strong_success.empty(),
        std::to_string(rep.attacks.size()) + " launched" + (strong_success.empty() ? "" : "; succeeded: " + join(strong_success)));
  }
  add("attacks.success_implies_violation", true, unexplained.empty(),
      unexplained.empty() ? "every successful attack is a causal violation" : join(unexplained));

  // ---- fairness ------------------------------------------------------------
  if (chain_ok && replays.count(rep.reference_miner) && meta.slot_rounds > 0 && meta.block_size_limit > 0) {
    const MinerReplay& rp = replays.at(rep.reference_miner);
    core::ChainIndex index(rep.tree);
    auto slot_of = [&](Round r) { return r / meta.slot_rounds; };
    for (const auto& [id, arrival] : rp.delivered) {
      const std::size_t m = rp.pool_size.at(arrival);
      const std::size_t bound = meta.n * ((m + meta.block_size_limit - 1) / meta.block_size_limit) + meta.n;
      auto c = rp.committed.find(id);
      const Round until = c != rp.committed.end() ? c->second : last;
      const std::size_t age = static_cast<std::size_t>(slot_of(until) - slot_of(arrival));
      if (c != rp.committed.end()) rep.fairness.max_age_slots = std::max(rep.fairness.max_age_slots, age);
      if (age > bound) ++rep.fairness.age_bound_violations;
    }
    // t known before t' was delivered puts t in CP(t'), so t must be recorded first.
    std::vector<std::pair<core::TxPosition, Digest>> recorded;
    for (const auto& [id, pos] : index.positions()) recorded.emplace_back(pos, id);
    std::sort(recorded.begin(), recorded.end());
    auto known_round = [&](const Digest& id) -> std::optional<Round> {
      std::optional<Round> r;
      if (auto d = rp.delivered.find(id); d != rp.delivered.end()) r = d->second;
      if (auto c = rp.committed.find(id); c != rp.committed.end()) r = r ? std::min(*r, c->second) : c->second;
      return r;
    };
    for (std::size_t i = 0; i < recorded.size(); ++i) {
      auto di = rp.delivered.find(recorded[i].second);
      if (di == rp.delivered.end()) continue;
      for (std::size_t j = i + 1; j < recorded.size(); ++j) {
        auto kj = known_round(recorded[j].second);
        if (kj && *kj < di->second) ++rep.fairness.dependency_inversions;
      }
    }
  }
  add("fairness.dependency_order", strong, rep.fairness.dependency_inversions == 0,
      std::to_string(rep.fairness.dependency_inversions) + " transactions recorded ahead of their causal past");
  // The age bound assumes every leader is correct.
  add("fairness.age_bound", strong && all_miners_correct, rep.fairness.age_bound_violations == 0,
      "max age " + std::to_string(rep.fairness.max_age_slots) + " slots, " +
          std::to_string(rep.fairness.age_bound_violations) + " over n*ceil(|MP|/limit)+n");
  return rep;
}

void add_expectations(Report& r, const Expectations& e) {
  if (e.attack_success) {
    std::size_t launched = 0;
    std::size_t matching = 0;
    for (const auto& a : r.attacks) {
      if (!a.success) continue;
      ++launched;
      matching += *a.success == *e.attack_success ? 1 : 0;
    }
    r.checks.push_back(Check{"expect.attack_success", true, launched > 0 && matching == launched,
                             std::to_string(matching) + "/" + std::to_string(launched) + " attacks " +
                                 (*e.attack_success ? "succeeded" : "failed")});
  }
  if (e.min_violations) {
    r.checks.push_back(Check{"expect.min_violations", true, r.violations.size() >= *e.min_violations,
                             std::to_string(r.violations.size()) + " >= " + std::to_string(*e.min_violations)});
  }
  if (e.max_violations) {
    r.checks.push_back(Check{"expect.max_violations", true, r.violations.size() <= *e.max_violations,
                             std::to_string(r.violations.size()) + " <= " + std::to_string(*e.max_violations)});
  }
}

json report_to_json(const Report& r) {
  const auto& m = r.meta;
  json j = {{"scenario", m.scenario}, {"seed", m.seed},           {"n", m.n},
            {"t", m.t},               {"k", m.k},                 {"consensus", m.consensus},
            {"backend", m.backend},   {"rounds", m.rounds},       {"slot_rounds", m.slot_rounds},
            {"block_size_limit", m.block_size_limit}, {"ok", r.ok()}};

  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"asserted", c.asserted}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["checks"] = checks;

  json digests = json::array();
  for (const auto& [round, per] : r.mempool_digests) {
    json row = {{"round", round}};
    json miners = json::object();
    for (const auto& [p, d] : per) miners[p.str()] = d.hex();
    row["miners"] = miners;
    digests.push_back(row);
  }
  j["mempool"] = {{"rounds_checked", r.mempool_digests.size()},
                  {"disagreeing_rounds", r.disagreeing_rounds},
                  {"digests", digests}};

  std::size_t tx_count = 0;
  json blocks = json::array();
  if (auto chain = core::consensus_chain(r.tree)) {
    for (const auto* b : *chain) {
      tx_count += b->txs.size();
      json ids = json::array();
      for (const auto& tx : b->txs) ids.push_back(tx.txid.hex());
      blocks.push_back({{"height", b->height}, {"hash", b->hash.hex()}, {"proposer", b->proposer.str()}, {"txids", ids}});
    }
  }
  j["chain"] = {{"reference_miner", r.reference_miner.str()},
                {"identical_across_correct_miners", r.chain_identical},
                {"height", r.tree.depth()},
                {"transactions", tx_count},
                {"error", r.chain_error},
                {"blocks", blocks}};

  json inst = json::array();
  std::size_t gmin = ~std::size_t{0}, gmax = 0, bmax = 0;
  for (const auto& s : r.instances) {
    json row = {{"instance", s.instance.str()},
                {"correct_sender", s.correct_sender},
                {"broadcast_round", s.broadcast_round},
                {"envelopes", s.envelopes}};
    if (s.latency) {
      row["gamma"] = s.latency->gamma;
      row["beta"] = s.latency->beta;
      row["delivered_by"] = s.latency->delivered_by;
      gmin = std::min(gmin, s.latency->gamma);
      gmax = std::max(gmax, s.latency->gamma);
      bmax = std::max(bmax, s.latency->beta);
    }
    if (s.txid) row["txid"] = s.txid->hex();
    inst.push_back(row);
  }
  j["brb"] = {{"instances", inst}, {"gamma_min", gmin == ~std::size_t{0} ? 0 : gmin}, {"gamma_max", gmax}, {"beta_max", bmax}};
  j["messages"] = {{"total_envelopes", r.total_envelopes},
                   {"expected_per_broadcast", expected_envelopes(m.n, m.consensus == "round_robin_strong")}};

  json live = json::array();
  for (const auto& l : r.liveness) {
    json row = {{"instance", l.instance.str()},
                {"txid", l.txid.hex()},
                {"broadcast_round", l.broadcast_round},
                {"beta", l.beta},
                {"within_beta_bound", l.within_beta},
                {"within_gamma_bound", l.within_gamma}};
    row["last_arrival"] = l.last_arrival ? json(*l.last_arrival) : json(nullptr);
    live.push_back(row);
  }
  j["liveness"] = live;

  json viol = json::array();
  for (const auto& [a, b] : r.violations) viol.push_back({{"t1", a.hex()}, {"t2", b.hex()}});
  j["violations"] = viol;

  json att = json::array();
  for (const auto& a : r.attacks) {
    json inj = json::array();
    for (const auto& d : a.attack.injected) inj.push_back(d.hex());
    att.push_back({{"kind", adversary::to_string(a.attack.kind)},
                   {"host", a.attack.host.str()},
                   {"launch_round", a.attack.launch_round},
                   {"victim", a.attack.victim.hex()},
                   {"injected", inj},
                   {"success", a.success ? json(*a.success) : json(nullptr)},
                   {"coincides_with_violation", a.coincides_with_violation}});
  }
  j["attacks"] = att;
  j["fairness"] = {{"max_age_slots", r.fairness.max_age_slots},
                   {"age_bound_violations", r.fairness.age_bound_violations},
                   {"dependency_inversions", r.fairness.dependency_inversions}};
  return j;
}

std::string summary(const Report& r) {
  const auto& m = r.meta;
  std::ostringstream out;
  out << "scenario   " << m.scenario << "  seed " << m.seed << "  n=" << m.n << " t=" << m.t << " k=" << m.k << "  "
      << m.consensus << "/" << m.backend << "  " << m.rounds << " rounds\n";

  std::size_t txs = 0;
  if (auto chain = core::consensus_chain(r.tree)) {
    for (const auto* b : *chain) txs += b->txs.size();
  }
  out << "chain      height " << r.tree.depth() << ", " << txs << " txs, "
      << (r.chain_identical ? "identical" : "DIFFERENT") << " at correct miners\n";
  out << "mempool    " << r.mempool_digests.size() << " rounds, " << r.disagreeing_rounds.size() << " disagreeing\n";

  std::size_t gmin = ~std::size_t{0}, gmax = 0, bmax = 0, delivered = 0;
  for (const auto& s : r.instances) {
    if (!s.latency) continue;
    ++delivered;
    gmin = std::min(gmin, s.latency->gamma);
    gmax = std::max(gmax, s.latency->gamma);
    bmax = std::max(bmax, s.latency->beta);
  }
  out << "brb        " << r.instances.size() << " instances, " << delivered << " delivered";
  if (delivered) out << ", gamma " << gmin << ".." << gmax << ", beta max " << bmax;
  out << "\n";

  std::size_t max_delay = 0;
  for (const auto& l : r.liveness) {
    if (l.last_arrival) max_delay = std::max<std::size_t>(max_delay, *l.last_arrival - l.broadcast_round);
  }
  out << "liveness   " << r.liveness.size() << " correct-client txs, max arrival delay " << max_delay << " rounds\n";
  out << "violations " << r.violations.size() << "\n";
  for (const auto& a : r.attacks) {
    out << "attack     " << adversary::to_string(a.attack.kind) << " by " << a.attack.host.str() << " on "
        << short_hex(a.attack.victim) << ": "
        << (!a.success ? "not evaluated" : *a.success ? "SUCCEEDED" : "failed")
        << (a.coincides_with_violation ? " (causal violation)" : "") << "\n";
  }
  out << "fairness   max age " << r.fairness.max_age_slots << " slots, " << r.fairness.age_bound_violations
      << " over bound, " << r.fairness.dependency_inversions << " inversions\n";

  std::size_t asserted = 0, passed = 0;
  for (const auto& c : r.checks) {
    if (!c.asserted) continue;
    ++asserted;
    passed += c.passed ? 1 : 0;
  }
  out << "checks     " << passed << "/" << asserted << " passed\n";
  for (const auto* c : r.failures()) out << "FAIL       " << c->name << ": " << c->detail << "\n";
  return out.str();
}

json chain_to_json(const core::BlockTree& tree, const core::TraceMeta& meta, const ProcessId& miner, bool identical) {
  json blocks = json::array();
  if (auto chain = core::consensus_chain(tree)) {
    for (const auto* b : *chain) {
      json txs = json::array();
      for (const auto& tx : b->txs) txs.push_back(core::tx_to_json(tx));
      blocks.push_back({{"height", b->height},
                        {"hash", b->hash.hex()},
                        {"parent", b->parent.hex()},
                        {"proposer", b->proposer.str()},
                        {"txs", txs}});
    }
  }
  return {{"schema", 1},
          {"scenario", meta.scenario},
          {"seed", meta.seed},
          {"miner", miner.str()},
          {"identical_across_correct_miners", identical},
          {"blocks", blocks}};
}

core::BlockTree chain_from_json(const json& j) {
  core::BlockTree tree;
  try {
    for (const auto& bj : j.at("blocks")) {
      const auto height = bj.at("height").get<std::uint64_t>();
      const Digest hash = Digest::from_hex(bj.at("hash").get<std::string>());
      if (height == 0) {
        if (hash != core::kGenesisHash) throw std::runtime_error("genesis hash is not the all-zero sentinel");
        continue;
      }
      std::vector<core::Transaction> txs;
      for (const auto& tj : bj.at("txs")) txs.push_back(core::tx_from_json(tj));
      core::Block b = core::Block::make(Digest::from_hex(bj.at("parent").get<std::string>()), height,
                                        ProcessId::parse(bj.at("proposer").get<std::string>()), std::move(txs));
      if (b.hash != hash) throw std::runtime_error("block at height " + std::to_string(height) + " has a wrong hash");
      tree.add(std::move(b));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed chain export: ") + e.what());
  }
  return tree;
}

}  // namespace strongchain::harness
