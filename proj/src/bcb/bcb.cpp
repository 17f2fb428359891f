#include "strongchain/bcb/bcb.hpp"

#include "strongchain/core/hash.hpp"

namespace strongchain::bcb {

MessageId tx_instance(ProcessId sender, std::uint64_t nonce) { return MessageId{sender, "tx:" + std::to_string(nonce)}; }

core::Bytes envelope_payload(Mode mode, const crypto::PublicKey* pk, const Transaction& tx, const MessageId& instance) {
  core::Bytes plain = tx.serialize();
  if (mode == Mode::plaintext) return plain;
  if (!pk) throw std::invalid_argument("encrypted broadcast needs a public key");
  return crypto::encrypt(*pk, plain, core::to_bytes(instance.str())).serialize();
}

void bc_broadcast(rounds::Outbox& out, Mode mode, const crypto::PublicKey* pk, const Transaction& tx) {
  const MessageId instance = tx_instance(out.self(), tx.nonce);
  brb::br_broadcast(out, instance, envelope_payload(mode, pk, tx, instance));
}

std::optional<Transaction> BroadcastQueue::release(rounds::Outbox& out, Mode mode, const crypto::PublicKey* pk) {
  if (queue_.empty()) return std::nullopt;
  Transaction tx = std::move(queue_.front());
  queue_.pop_front();
  bc_broadcast(out, mode, pk, tx);
  return tx;
}

Digest mempool_digest(const std::map<Digest, MempoolEntry>& pool) {
  core::Writer w;
  w.str("mempool").u64(pool.size());
  for (const auto& [txid, entry] : pool) {
    w.digest(txid).u64(entry.delivery_round).digest(entry.causal_past.digest());
  }
  return core::sha256(w.data());
}

BcbMinerState::BcbMinerState(ProcessId self, BcbConfig config, const crypto::VerificationKey* vk,
                             const crypto::SecretKeyShare* sk)
    : self_(self), config_(config), vk_(vk), sk_(sk) {
  if (config_.mode == Mode::encrypted && (!vk_ || !sk_)) {
    throw std::invalid_argument("encrypted mode needs verification key and secret share");
  }
}

void BcbMinerState::on_br_deliver(Round round, const brb::BrbDelivery& d, rounds::Outbox& out) {
  if (config_.mode == Mode::plaintext) {
    install(round, d.instance, d.payload, out);
    return;
  }
  Pending& p = pending_[d.instance];
  if (p.done || p.ciphertext) return;
  crypto::Ciphertext c;
  try {
    c = crypto::Ciphertext::deserialize(d.payload);
  } catch (const std::exception&) {
    flag(d.instance.sender);
    p.done = true;
    return;
  }
  if (c.label != core::to_bytes(d.instance.str())) {
    flag(d.instance.sender);
    p.done = true;
    return;
  }
  crypto::DecryptionShare mine;
  try {
    mine = crypto::share(*sk_, c);
  } catch (const crypto::CryptoError&) {
    flag(d.instance.sender);
    p.done = true;
    return;
  }
  p.ciphertext = std::move(c);
  out.broadcast(core::ShareMessage{d.instance, mine.holder, mine.serialize()});

  for (auto& s : p.unchecked) {
    if (p.verified.count(s.holder)) continue;
    if (crypto::verify(*vk_, *p.ciphertext, s)) {
      p.verified.emplace(s.holder, std::move(s));
    } else {
      flag(ProcessId::miner(s.holder));
    }
  }
  p.unchecked.clear();
  try_decrypt(round, d.instance, p, out);
}

void BcbMinerState::on_share(Round round, const ProcessId& from, const core::ShareMessage& msg, rounds::Outbox& out) {
  if (config_.mode == Mode::plaintext) return;
  if (!from.is_miner() || msg.holder != from.index) {
    flag(from);
    return;
  }
  crypto::DecryptionShare s;
  try {
    s = crypto::DecryptionShare::deserialize(msg.share);
  } catch (const std::exception&) {
    flag(from);
    return;
  }
  if (s.holder != msg.holder) {
    flag(from);
    return;
  }
  Pending& p = pending_[msg.instance];
  if (p.done) return;
  if (!p.ciphertext) {
    if (p.unchecked.size() < 4 * config_.n) p.unchecked.push_back(std::move(s));
    return;
  }
  if (p.verified.count(s.holder)) return;
  if (!crypto::verify(*vk_, *p.ciphertext, s)) {
    flag(from);
    return;
  }
  p.verified.emplace(s.holder, std::move(s));
  try_decrypt(round, msg.instance, p, out);
}

void BcbMinerState::try_decrypt(Round round, const MessageId& instance, Pending& p, rounds::Outbox& out) {
  if (p.done || !p.ciphertext || p.verified.size() < config_.k()) return;
  p.done = true;
  std::vector<crypto::DecryptionShare> shares;
  for (const auto& [holder, s] : p.verified) shares.push_back(s);
  core::Bytes plain;
  try {
    plain = crypto::combine(*vk_, *p.ciphertext, shares);
  } catch (const crypto::CryptoError&) {
    flag(instance.sender);
    return;
  }
  p.ciphertext.reset();
  p.verified.clear();
  install(round, instance, plain, out);
}

void BcbMinerState::install(Round round, const MessageId& instance, const core::Bytes& plaintext,
                            rounds::Outbox& out) {
  Transaction tx;
  try {
    tx = Transaction::deserialize(plaintext);
  } catch (const std::exception&) {
    flag(instance.sender);
    return;
  }
  // The envelope's sender is the only identity a transaction may claim.
  if (tx.client != instance.sender || instance != tx_instance(tx.client, tx.nonce)) {
    flag(instance.sender);
    return;
  }
  if (pool_.count(tx.txid) || recorded_.count(tx.txid)) return;

  MempoolEntry entry{tx, round, snapshot_};
  auto [it, inserted] = pool_.emplace(tx.txid, std::move(entry));

  core::TraceEvent ev;
  ev.kind = core::EventKind::bc_deliver;
  ev.instance = instance;
  ev.tx = tx;
  out.record(std::move(ev));
  if (observer_) observer_(it->second, out);
}

void BcbMinerState::on_round_end(Round round) {
  std::vector<Digest> all(recorded_.begin(), recorded_.end());
  for (const auto& [txid, entry] : pool_) all.push_back(txid);
  snapshot_ = core::CausalSnapshot(round, std::move(all));
}

void BcbMinerState::on_commit(const core::Block& block) {
  for (const auto& tx : block.txs) {
    recorded_.insert(tx.txid);
    pool_.erase(tx.txid);
  }
}

}  // namespace strongchain::bcb
