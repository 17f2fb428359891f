#include "strongchain/adversary/attack.hpp"

#include <algorithm>
#include <stdexcept>

namespace strongchain::adversary {

std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::displacement: return "displacement";
    case AttackKind::sandwich: return "sandwich";
    case AttackKind::suppression: return "suppression";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view s) {
  if (s == "displacement") return AttackKind::displacement;
  if (s == "sandwich") return AttackKind::sandwich;
  if (s == "suppression") return AttackKind::suppression;
  throw std::invalid_argument("unknown attack kind '" + std::string(s) + "' (expected displacement|sandwich|suppression)");
}

bool TargetPredicate::matches(const Transaction& tx) const {
  if (client && tx.client != *client) return false;
  if (payload_prefix) {
    const auto& p = *payload_prefix;
    if (tx.payload.size() < p.size() || !std::equal(p.begin(), p.end(), tx.payload.begin())) return false;
  }
  return true;
}

namespace {

core::Bytes tagged(std::string_view tag, const core::Bytes& payload) {
  core::Bytes out(tag.begin(), tag.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

}  // namespace

Transaction displacement(const AttackStrategy& s, const Transaction& t, ProcessId attacker, std::uint64_t nonce) {
  return Transaction::make(attacker, nonce, t.payload, std::max<std::uint64_t>(1, t.fee) * s.fee_multiplier);
}

std::pair<Transaction, Transaction> sandwich(const AttackStrategy& s, const Transaction& t1, ProcessId attacker,
                                             std::uint64_t first_nonce) {
  Transaction t0 = Transaction::make(attacker, first_nonce, tagged("buy:", t1.payload),
                                     std::max<std::uint64_t>(1, t1.fee) * s.fee_multiplier);
  Transaction t2 = Transaction::make(attacker, first_nonce + 1, tagged("sell:", t1.payload), t1.fee / 2);
  return {std::move(t0), std::move(t2)};
}

std::vector<Transaction> suppression(const AttackStrategy& s, const Transaction& t, ProcessId attacker,
                                     std::uint64_t first_nonce, std::size_t count) {
  std::vector<Transaction> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(Transaction::make(attacker, first_nonce + i, tagged("fill" + std::to_string(i) + ":", t.payload),
                                    std::max<std::uint64_t>(1, t.fee) * s.fee_multiplier));
  }
  return out;
}

std::vector<AttackInstance> attack_instances(const core::Trace& trace) {
  std::vector<AttackInstance> out;
  for (const auto& ev : trace.events) {
    if (ev.kind != core::EventKind::attack_launch || !ev.attack) continue;
    out.push_back(AttackInstance{parse_attack_kind(ev.attack->kind), ev.process, ev.round, ev.attack->victim,
                                 ev.attack->injected});
  }
  return out;
}

std::optional<bool> attack_success(const core::Trace& trace, const core::BlockTree& tree, const AttackInstance& a) {
  if (a.injected.empty()) return std::nullopt;
  core::ChainIndex index(tree);
  const auto victim = index.position(a.victim);

  switch (a.kind) {
    case AttackKind::displacement: {
      const auto injected = index.position(a.injected.front());
      return injected && (!victim || *injected < *victim);
    }
    case AttackKind::sandwich: {
      if (a.injected.size() < 2 || !victim) return false;
      const auto front = index.position(a.injected[0]);
      const auto back = index.position(a.injected[1]);
      return front && back && front->block_index == victim->block_index && back->block_index == victim->block_index &&
             *front < *victim && *victim < *back;
    }
    case AttackKind::suppression: {
      std::optional<Round> arrival;
      for (const auto& ev : trace.events) {
        if (ev.kind == core::EventKind::bc_deliver && ev.tx && ev.tx->txid == a.victim && ev.process.is_miner() &&
            !trace.meta.is_byzantine(ev.process)) {
          arrival = ev.round;
          break;
        }
      }
      if (!arrival) return false;
      // Chain blocks are matched to their commit round via block_commit events.
      std::map<Digest, Round> commit_round;
      for (const auto& ev : trace.events) {
        if (ev.kind == core::EventKind::block_commit && ev.block) commit_round.emplace(ev.block->hash, ev.round);
      }
      const std::set<Digest> injected(a.injected.begin(), a.injected.end());
      for (const auto* b : index.chain()) {
        auto cr = commit_round.find(b->hash);
        if (b->is_genesis() || cr == commit_round.end() || cr->second < *arrival) continue;
        const bool full = b->txs.size() >= trace.meta.block_size_limit;
        const bool holds_victim = b->contains(a.victim);
        if (!full && !holds_victim) continue;
        const bool has_filler =
            std::any_of(b->txs.begin(), b->txs.end(), [&](const Transaction& tx) { return injected.count(tx.txid); });
        return full && has_filler && !holds_victim;
      }
      return false;
    }
  }
  return false;
}

AttackPlanner::AttackPlanner(ProcessId self, AttackStrategy strategy, std::size_t block_size_limit)
    : self_(self), strategy_(std::move(strategy)), block_size_limit_(block_size_limit) {}

bool AttackPlanner::is_injected(const Digest& txid) const {
  for (const auto& a : launched_) {
    if (std::find(a.injected.begin(), a.injected.end(), txid) != a.injected.end()) return true;
  }
  return false;
}

bool AttackPlanner::observe(const Transaction& tx, rounds::Outbox& out) {
  if (launched_.size() >= strategy_.max_launches || tx.client == self_ || is_injected(tx.txid)) return false;
  if (!strategy_.target.matches(tx) || !seen_.insert(tx.txid).second) return false;

  std::vector<Transaction> txs;
  switch (strategy_.kind) {
    case AttackKind::displacement: txs.push_back(displacement(strategy_, tx, self_, nonce_)); break;
    case AttackKind::sandwich: {
      auto [t0, t2] = sandwich(strategy_, tx, self_, nonce_);
      txs.push_back(std::move(t0));
      txs.push_back(std::move(t2));
      break;
    }
    case AttackKind::suppression: {
      const std::size_t count = strategy_.filler_count ? strategy_.filler_count : block_size_limit_;
      txs = suppression(strategy_, tx, self_, nonce_, count);
      break;
    }
  }
  nonce_ += txs.size();

  AttackInstance inst{strategy_.kind, self_, out.round(), tx.txid, {}};
  for (auto& t : txs) {
    inst.injected.push_back(t.txid);
    queue_.push(std::move(t));
  }
  core::TraceEvent ev;
  ev.kind = core::EventKind::attack_launch;
  ev.attack = core::AttackRecord{to_string(inst.kind), inst.victim, inst.injected};
  out.record(std::move(ev));
  launched_.push_back(std::move(inst));
  return true;
}

void AttackPlanner::release(rounds::Outbox& out, bcb::Mode mode, const crypto::PublicKey* pk) {
  queue_.release(out, mode, pk);
}

AttackingMiner::AttackingMiner(ProcessId self, chain::ConsensusPlug plug, const crypto::VerificationKey* vk,
                               const crypto::SecretKeyShare* sk, const crypto::PublicKey* pk, AttackStrategy strategy)
    : MinerNode(self, plug, vk, sk), pk_(pk), planner_(self, std::move(strategy), plug.block_size_limit) {
  // The only plaintext this miner ever sees is what enters its mempool.
  bcb().set_arrival_observer([this](const core::MempoolEntry& entry, rounds::Outbox& out) {
    const auto& s = planner_.strategy();
    if (s.colluder) {
      if (entry.tx.client != *s.colluder && s.target.matches(entry.tx) &&
          forwarded_victims_.size() < s.max_launches && forwarded_victims_.insert(entry.tx.txid).second) {
        out.send(*s.colluder, core::ForwardMessage{entry.tx});
      }
      return;
    }
    planner_.observe(entry.tx, out);
  });
  set_proposal_filter([this](std::uint64_t slot, const chain::Block& honest) { return reorder(slot, honest); });
}

void AttackingMiner::on_round_start(Round round, rounds::Outbox& out) {
  MinerNode::on_round_start(round, out);
  planner_.release(out, plug().mode(), pk_);
}

std::optional<chain::Block> AttackingMiner::reorder(std::uint64_t, const chain::Block& honest) const {
  // Injected transactions first (for a sandwich: t0, victim, t2), then the rest.
  std::set<Digest> attacker_txs;
  std::vector<Digest> front;
  std::vector<Digest> back;
  const auto& pool = bcb().mempool();
  auto add_launch = [&](const AttackInstance& a) {
    for (std::size_t i = 0; i < a.injected.size(); ++i) {
      if (!pool.count(a.injected[i])) continue;
      attacker_txs.insert(a.injected[i]);
      (a.kind == AttackKind::sandwich && i == 1 ? back : front).push_back(a.injected[i]);
    }
    if (a.kind == AttackKind::sandwich && pool.count(a.victim)) {
      attacker_txs.insert(a.victim);
      front.push_back(a.victim);
    }
  };
  for (const auto& a : planner_.launched()) add_launch(a);
  if (front.empty() && back.empty()) return std::nullopt;

  std::vector<Transaction> txs;
  for (const auto& d : front) txs.push_back(pool.at(d).tx);
  for (const auto& d : back) txs.push_back(pool.at(d).tx);
  for (const auto& tx : honest.txs) {
    if (!attacker_txs.count(tx.txid)) txs.push_back(tx);
  }
  if (txs.size() > plug().block_size_limit) txs.resize(plug().block_size_limit);
  return chain::Block::make(honest.parent, honest.height, honest.proposer, std::move(txs));
}

AttackingClient::AttackingClient(ProcessId self, chain::ConsensusPlug plug, const crypto::PublicKey* pk,
                                 AttackStrategy strategy, std::optional<ProcessId> partner)
    : plug_(plug), pk_(pk), planner_(self, std::move(strategy), plug.block_size_limit), partner_(partner) {}

void AttackingClient::on_round_start(Round, rounds::Outbox& out) { planner_.release(out, plug_.mode(), pk_); }

void AttackingClient::on_deliver(Round, const rounds::Envelope& env, rounds::Outbox& out) {
  if (const auto* f = std::get_if<core::ForwardMessage>(&env.payload())) {
    if (partner_ && env.from == *partner_) planner_.observe(f->tx, out);
    return;
  }
  if (const auto* p = std::get_if<core::ProposeMessage>(&env.payload())) {
    for (const auto& tx : p->block.txs) planner_.observe(tx, out);
  }
}

}  // namespace strongchain::adversary
