#include "strongchain/core/types.hpp"

#include <algorithm>
#include <charconv>

#include "strongchain/core/hash.hpp"

namespace strongchain::core {

std::string ProcessId::str() const { return (is_miner() ? "m" : "c") + std::to_string(index); }

ProcessId ProcessId::parse(std::string_view s) {
  if (s.size() < 2 || (s[0] != 'm' && s[0] != 'c')) throw DecodeError("bad process id: " + std::string(s));
  std::uint32_t idx = 0;
  auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), idx);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw DecodeError("bad process id: " + std::string(s));
  return s[0] == 'm' ? miner(idx) : client(idx);
}

void encode(Writer& w, const ProcessId& p) { w.u8(static_cast<std::uint8_t>(p.kind)).u32(p.index); }

ProcessId decode_process(Reader& r) {
  std::uint8_t kind = r.u8();
  if (kind > 1) throw DecodeError("bad process kind");
  return {static_cast<ProcessKind>(kind), r.u32()};
}

std::string MessageId::str() const { return sender.str() + "/" + label; }

MessageId MessageId::parse(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) throw DecodeError("bad message id: " + std::string(s));
  return {ProcessId::parse(s.substr(0, slash)), std::string(s.substr(slash + 1))};
}

void encode(Writer& w, const MessageId& m) {
  encode(w, m.sender);
  w.str(m.label);
}

MessageId decode_message_id(Reader& r) {
  ProcessId p = decode_process(r);
  return {p, r.str()};
}

Transaction Transaction::make(ProcessId client, std::uint64_t nonce, Bytes payload, std::uint64_t fee) {
  Transaction tx{client, nonce, std::move(payload), fee, {}};
  tx.txid = tx.compute_txid();
  return tx;
}

Digest Transaction::compute_txid() const {
  Writer w;
  encode(w, client);
  w.u64(nonce).bytes(payload).u64(fee);
  return sha256(w.data());
}

void encode(Writer& w, const Transaction& tx) {
  encode(w, tx.client);
  w.u64(tx.nonce).bytes(tx.payload).u64(tx.fee);
}

Transaction decode_transaction(Reader& r) {
  ProcessId client = decode_process(r);
  std::uint64_t nonce = r.u64();
  Bytes payload = r.bytes();
  std::uint64_t fee = r.u64();
  return Transaction::make(client, nonce, std::move(payload), fee);
}

Bytes Transaction::serialize() const {
  Writer w;
  encode(w, *this);
  return w.take();
}

Transaction Transaction::deserialize(ByteView in) {
  Reader r(in);
  Transaction tx = decode_transaction(r);
  r.expect_done();
  return tx;
}

CausalSnapshot::CausalSnapshot(Round round, std::vector<Digest> txids) : round_(round) {
  std::sort(txids.begin(), txids.end());
  txids.erase(std::unique(txids.begin(), txids.end()), txids.end());
  Writer w;
  w.str("causal-past").u64(txids.size());
  for (const auto& d : txids) w.digest(d);
  digest_ = sha256(w.data());
  txids_ = std::make_shared<const std::vector<Digest>>(std::move(txids));
}

bool CausalSnapshot::contains(const Digest& txid) const {
  return std::binary_search(txids_->begin(), txids_->end(), txid);
}

}  // namespace strongchain::core
