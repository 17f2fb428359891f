#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "strongchain/brb/brb.hpp"
#include "strongchain/core/block.hpp"
#include "strongchain/crypto/threshold.hpp"

namespace strongchain::bcb {

using core::Digest;
using core::MempoolEntry;
using core::MessageId;
using core::ProcessId;
using core::Round;
using core::Transaction;

enum class Mode : std::uint8_t {
  encrypted,  // threshold-encrypted envelope, decrypt on k verified shares
  plaintext,  // baseline: the BRB payload is the transaction, installed at BR_deliver
};

/// Decryption threshold used by the protocol: all 2t+1 correct shares.
inline std::size_t decryption_threshold(std::size_t t) { return 2 * t + 1; }

struct BcbConfig {
  std::size_t n = 4;
  std::size_t t = 1;
  Mode mode = Mode::encrypted;

  std::size_t k() const { return decryption_threshold(t); }
};

/// Instance label for a client's transaction with the given nonce.
MessageId tx_instance(ProcessId sender, std::uint64_t nonce);

/// Bytes that travel inside the INIT: ciphertext of the serialized transaction
/// (label = instance id), or the plain serialization in baseline mode.
core::Bytes envelope_payload(Mode mode, const crypto::PublicKey* pk, const Transaction& tx, const MessageId& instance);

/// Client side: encrypt (unless plaintext) and BR_broadcast.
void bc_broadcast(rounds::Outbox& out, Mode mode, const crypto::PublicKey* pk, const Transaction& tx);

/// Releases at most one queued transaction per round.
class BroadcastQueue {
 public:
  void push(Transaction tx) { queue_.push_back(std::move(tx)); }
  /// Call from on_round_start. Returns the transaction sent, if any.
  std::optional<Transaction> release(rounds::Outbox& out, Mode mode, const crypto::PublicKey* pk);
  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }

 private:
  std::deque<Transaction> queue_;
};

/// Order-independent digest of a mempool: sorted (txid, delivery round, causal past).
Digest mempool_digest(const std::map<Digest, MempoolEntry>& pool);

/// Miner-side causal broadcast state.
class BcbMinerState {
 public:
  using ArrivalObserver = std::function<void(const MempoolEntry&, rounds::Outbox&)>;

  BcbMinerState(ProcessId self, BcbConfig config, const crypto::VerificationKey* vk, const crypto::SecretKeyShare* sk);

  /// After BR_deliver of an envelope. Encrypted mode: releases this miner's share
  /// (it leaves next round). Plaintext mode: installs the transaction directly.
  void on_br_deliver(Round round, const brb::BrbDelivery& d, rounds::Outbox& out);

  /// A SHARE envelope. Unverifiable shares, or shares whose holder is not the
  /// sending miner, are dropped.
  void on_share(Round round, const ProcessId& from, const core::ShareMessage& msg, rounds::Outbox& out);

  /// Freezes MP ∪ recorded as the causal past for the next round's deliveries.
  void on_round_end(Round round);

  void on_commit(const core::Block& block);

  const std::map<Digest, MempoolEntry>& mempool() const { return pool_; }
  const std::set<Digest>& recorded() const { return recorded_; }
  Digest mempool_digest() const { return bcb::mempool_digest(pool_); }
  const std::map<ProcessId, std::size_t>& misbehavior() const { return misbehavior_; }
  std::size_t pending_count() const { return pending_.size(); }
  const BcbConfig& config() const { return config_; }

  /// Called with every new mempool entry; this is when a miner first sees
  /// the plaintext.
  void set_arrival_observer(ArrivalObserver obs) { observer_ = std::move(obs); }

 private:
  struct Pending {
    std::optional<crypto::Ciphertext> ciphertext;
    std::map<std::uint32_t, crypto::DecryptionShare> verified;
    std::vector<crypto::DecryptionShare> unchecked;  // arrived before the ciphertext
    bool done = false;
  };

  void try_decrypt(Round round, const MessageId& instance, Pending& p, rounds::Outbox& out);
  void install(Round round, const MessageId& instance, const core::Bytes& plaintext, rounds::Outbox& out);
  void flag(const ProcessId& p) { ++misbehavior_[p]; }

  ProcessId self_;
  BcbConfig config_;
  const crypto::VerificationKey* vk_;
  const crypto::SecretKeyShare* sk_;
  std::map<MessageId, Pending> pending_;
  std::map<Digest, MempoolEntry> pool_;
  std::set<Digest> recorded_;
  core::CausalSnapshot snapshot_;
  std::map<ProcessId, std::size_t> misbehavior_;
  ArrivalObserver observer_;
};

}  // namespace strongchain::bcb
