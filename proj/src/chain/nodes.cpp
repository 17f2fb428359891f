#include "strongchain/chain/nodes.hpp"

#include <algorithm>

namespace strongchain::chain {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool contains_pattern(const core::Bytes& payload, const std::string& pattern) {
  if (pattern.empty()) return true;
  return std::search(payload.begin(), payload.end(), pattern.begin(), pattern.end()) != payload.end();
}

}  // namespace

MinerNode::MinerNode(ProcessId self, ConsensusPlug plug, const crypto::VerificationKey* vk,
                     const crypto::SecretKeyShare* sk)
    : self_(self),
      brb_(brb::BrbConfig::make(plug.n, plug.t)),
      bcb_(self, bcb::BcbConfig{plug.n, plug.t, plug.mode()}, vk, sk),
      view_(plug) {}

void MinerNode::on_round_start(Round round, Outbox& out) {
  const ConsensusPlug& p = plug();
  if (!p.is_proposal_round(round)) return;
  const std::uint64_t slot = p.slot_of(round);
  if (p.leader(slot) != self_) return;
  Block block = propose_block(p.kind, tip(), bcb_.recorded(), bcb_.mempool(), self_, p.block_size_limit);
  if (filter_) {
    if (auto replaced = filter_(slot, block)) block = std::move(*replaced);
  }
  out.broadcast_all(core::ProposeMessage{slot, std::move(block)});
}

void MinerNode::on_deliver(Round round, const Envelope& env, Outbox& out) {
  std::visit(overloaded{
                 [&](const core::BrbMessage& m) {
                   if (auto d = brb_.on_message(env.from, m, out)) {
                     core::TraceEvent ev;
                     ev.kind = core::EventKind::br_deliver;
                     ev.instance = d->instance;
                     out.record(std::move(ev));
                     bcb_.on_br_deliver(round, *d, out);
                   }
                 },
                 [&](const core::ShareMessage& m) { bcb_.on_share(round, env.from, m, out); },
                 [&](const core::ProposeMessage& m) { view_.on_propose(round, env.from, m); },
                 [&](const core::VoteMessage& m) { view_.on_vote(round, env.from, m); },
                 [&](const auto&) { on_other(round, env, out); },
             },
             env.payload());
}

bool MinerNode::validate(const Block& block) const {
  if (block.parent != tip().hash || block.height != tip().height + 1) return false;
  if (block.compute_hash() != block.hash) return false;
  if (block.txs.size() > plug().block_size_limit) return false;
  std::set<Digest> seen;
  for (const auto& tx : block.txs) {
    if (!tx.txid_consistent() || !seen.insert(tx.txid).second) return false;
    auto it = bcb_.mempool().find(tx.txid);
    if (it == bcb_.mempool().end() || !(it->second.tx == tx)) return false;
  }
  if (plug().kind == ConsensusKind::round_robin_strong) return is_safe_block(bcb_.recorded(), block, bcb_.mempool());
  return true;
}

void MinerNode::on_round_end(Round round, Outbox& out) {
  const ConsensusPlug& p = plug();
  if (p.is_proposal_round(round)) {
    // Validated after all of this round's deliveries, so every correct miner
    // judges against the same end-of-round mempool. The vote leaves next round.
    const std::uint64_t slot = p.slot_of(round);
    auto props = view_.proposals(slot);
    if (!props.empty() && voted_slot_ != slot) {
      voted_slot_ = slot;
      const Block& first = props.front();
      out.broadcast_all(core::VoteMessage{slot, first.hash, props.size() == 1 && validate(first)});
    }
  }
  if (auto committed = view_.decide(round)) {
    bcb_.on_commit(*committed);
    core::TraceEvent ev;
    ev.kind = core::EventKind::block_commit;
    ev.block = header_of(*committed);
    out.record(std::move(ev));
  }
  bcb_.on_round_end(round);
}

ClientNode::ClientNode(ProcessId self, ConsensusPlug plug, const crypto::PublicKey* pk, std::vector<ScriptedTx> script,
                       std::vector<ReactiveRule> rules)
    : self_(self), view_(plug), pk_(pk), script_(std::move(script)), rules_(std::move(rules)), fired_(rules_.size(), 0) {
  std::stable_sort(script_.begin(), script_.end(), [](const ScriptedTx& a, const ScriptedTx& b) { return a.round < b.round; });
}

core::Transaction ClientNode::next(core::Bytes payload, std::uint64_t fee) {
  return core::Transaction::make(self_, nonce_++, std::move(payload), fee);
}

void ClientNode::on_round_start(Round round, Outbox& out) {
  for (const auto& s : script_) {
    if (s.round == round) queue_.push(next(s.payload, s.fee));
  }
  if (auto tx = queue_.release(out, view_.plug().mode(), pk_)) sent_.emplace_back(round, std::move(*tx));
}

void ClientNode::on_deliver(Round round, const Envelope& env, Outbox&) {
  if (const auto* p = std::get_if<core::ProposeMessage>(&env.payload())) view_.on_propose(round, env.from, *p);
  if (const auto* v = std::get_if<core::VoteMessage>(&env.payload())) view_.on_vote(round, env.from, *v);
}

void ClientNode::on_round_end(Round round, Outbox&) {
  auto committed = view_.decide(round);
  if (!committed) return;
  for (const auto& tx : committed->txs) {
    if (tx.client == self_) continue;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (fired_[i] >= rules_[i].max_fires || !contains_pattern(tx.payload, rules_[i].pattern)) continue;
      ++fired_[i];
      queue_.push(next(rules_[i].payload, rules_[i].fee));
    }
  }
}

}  // namespace strongchain::chain
