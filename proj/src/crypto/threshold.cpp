#include "strongchain/crypto/threshold.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gf256.hpp"
#include "strongchain/core/hash.hpp"

namespace strongchain::crypto {

using core::Reader;
using core::Writer;

namespace {

using Code = CryptoError::Code;

DlogGroup make_group(std::string name, const char* p_hex) {
  DlogGroup g;
  g.name = std::move(name);
  g.p = mpz_class(p_hex, 16);
  g.q = (g.p - 1) / 2;
  g.g = 4;  // a nontrivial square, hence a generator of the order-q subgroup
  g.element_bytes = (mpz_sizeinbase(g.p.get_mpz_t(), 2) + 7) / 8;
  g.scalar_bytes = (mpz_sizeinbase(g.q.get_mpz_t(), 2) + 7) / 8;
  return g;
}

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

mpz_class invert(const mpz_class& a, const mpz_class& mod) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw CryptoError(Code::parameter, "value not invertible");
  }
  return out;
}

Bytes encode_fixed(const mpz_class& x, std::size_t width) {
  Bytes out(width, 0);
  std::size_t count = 0;
  Bytes tmp((mpz_sizeinbase(x.get_mpz_t(), 2) + 7) / 8 + 1);
  mpz_export(tmp.data(), &count, 1, 1, 1, 0, x.get_mpz_t());
  if (count > width) throw CryptoError(Code::parameter, "integer wider than its field");
  std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(count), out.end() - static_cast<std::ptrdiff_t>(count));
  return out;
}

mpz_class decode_int(ByteView in) {
  mpz_class x;
  if (!in.empty()) mpz_import(x.get_mpz_t(), in.size(), 1, 1, 1, 0, in.data());
  return x;
}

/// SHA-256 counter-mode expansion reduced mod `mod`, with 64 spare bits to
/// keep the reduction bias negligible.
mpz_class hash_to_scalar(ByteView data, const mpz_class& mod, std::size_t scalar_bytes) {
  Bytes wide;
  for (std::uint32_t ctr = 0; wide.size() < scalar_bytes + 8; ++ctr) {
    Writer w;
    w.str("h2z").u32(ctr).raw(data);
    Digest d = core::sha256(w.data());
    wide.insert(wide.end(), d.bytes.begin(), d.bytes.end());
  }
  wide.resize(scalar_bytes + 8);
  mpz_class x = decode_int(wide);
  return x % mod;
}

/// Deterministic dealer randomness.
class Drbg {
 public:
  explicit Drbg(std::uint64_t seed, std::string_view domain) {
    Writer w;
    w.str(domain).u64(seed);
    key_ = w.take();
  }

  Digest next() {
    Writer w;
    w.raw(key_).u64(counter_++);
    return core::sha256(w.data());
  }

  mpz_class scalar(const DlogGroup& g) {
    Digest d = next();
    return hash_to_scalar(d.bytes, g.q, g.scalar_bytes);
  }

 private:
  Bytes key_;
  std::uint64_t counter_ = 0;
};

Bytes keystream(ByteView key_material, ByteView label, std::size_t len) {
  Bytes out;
  out.reserve(len + 32);
  for (std::uint64_t ctr = 0; out.size() < len; ++ctr) {
    Writer w;
    w.str("keystream").bytes(key_material).bytes(label).u64(ctr);
    Digest d = core::sha256(w.data());
    out.insert(out.end(), d.bytes.begin(), d.bytes.end());
  }
  out.resize(len);
  return out;
}

Digest tag_for(ByteView key_material, const Ciphertext& c) {
  Writer kw;
  kw.str("tag").bytes(key_material);
  Digest tag_key = core::sha256(kw.data());
  return core::hmac_sha256(tag_key.bytes, c.body_encoding());
}

Bytes xor_bytes(ByteView a, ByteView b) {
  Bytes out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

bool constant_time_equal(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc |= a[i] ^ b[i];
  return acc == 0;
}

// ---- mock backend ---------------------------------------------------------

std::array<std::uint8_t, 32> mock_pad(const Digest& pad_key, ByteView label) {
  Writer w;
  w.str("pad").bytes(label);
  return core::hmac_sha256(pad_key.bytes, w.data()).bytes;
}

Digest mock_holder_mac_key(const Digest& dealer_mac_key, std::uint32_t holder) {
  Writer w;
  w.str("holder").u32(holder);
  return core::hmac_sha256(dealer_mac_key.bytes, w.data());
}

Bytes mock_share_proof(const Digest& mac_key, std::uint32_t holder, const Ciphertext& c, ByteView value) {
  Writer w;
  w.str("share").u32(holder).digest(c.digest()).bytes(value);
  Digest d = core::hmac_sha256(mac_key.bytes, w.data());
  return Bytes(d.bytes.begin(), d.bytes.end());
}

Ciphertext mock_encrypt(const PublicKey& pk, const MockPublicKey& key, ByteView m, ByteView label) {
  Writer kw;
  kw.str("kappa").bytes(label).bytes(m);
  Digest kappa = core::hmac_sha256(key.nonce_key.bytes, kw.data());

  std::vector<std::array<std::uint8_t, 32>> coeffs;
  for (std::uint32_t j = 1; j < pk.k; ++j) {
    Writer cw;
    cw.str("coef").u32(j).digest(kappa);
    coeffs.push_back(core::hmac_sha256(key.nonce_key.bytes, cw.data()).bytes);
  }

  Ciphertext c;
  c.backend = Backend::mock;
  c.label.assign(label.begin(), label.end());
  for (std::uint32_t holder = 1; holder <= pk.n_holders; ++holder) {
    std::array<std::uint8_t, 32> y{};
    std::vector<std::uint8_t> byte_coeffs(coeffs.size());
    for (std::size_t b = 0; b < 32; ++b) {
      for (std::size_t j = 0; j < coeffs.size(); ++j) byte_coeffs[j] = coeffs[j][b];
      y[b] = gf256::eval(kappa.bytes[b], byte_coeffs, static_cast<std::uint8_t>(holder));
    }
    auto pad = mock_pad(key.pad_keys[holder - 1], label);
    for (std::size_t b = 0; b < 32; ++b) y[b] ^= pad[b];
    c.escrow.push_back(y);
  }
  c.masked = xor_bytes(m, keystream(kappa.bytes, label, m.size()));
  c.tag = tag_for(kappa.bytes, c);
  return c;
}

Bytes mock_share_value(const Digest& pad_key, std::uint32_t holder, const Ciphertext& c) {
  auto pad = mock_pad(pad_key, c.label);
  Bytes y(32);
  for (std::size_t b = 0; b < 32; ++b) y[b] = c.escrow[holder - 1][b] ^ pad[b];
  return y;
}

// ---- dlog backend ---------------------------------------------------------

Bytes dlog_transcript(const DlogGroup& g, std::uint32_t holder, const mpz_class& commitment, const mpz_class& u,
                      const mpz_class& sigma, const mpz_class& a1, const mpz_class& a2, const Digest& c_digest) {
  Writer w;
  w.str("dleq").str(g.name).u32(holder);
  for (const mpz_class* x : {&g.g, &commitment, &u, &sigma, &a1, &a2}) w.bytes(encode_fixed(*x, g.element_bytes));
  w.digest(c_digest);
  return w.take();
}

bool valid_ephemeral(const DlogGroup& g, const Ciphertext& c, mpz_class& u) {
  if (c.ephemeral.size() != g.element_bytes) return false;
  u = decode_int(c.ephemeral);
  return g.is_element(u);
}

}  // namespace

std::string to_string(Backend b) { return b == Backend::mock ? "mock" : "dlog"; }

Backend parse_backend(std::string_view s) {
  if (s == "mock") return Backend::mock;
  if (s == "dlog") return Backend::dlog;
  throw std::invalid_argument("unknown crypto backend '" + std::string(s) + "' (expected mock|dlog)");
}

const DlogGroup& DlogGroup::named(std::string_view name) {
  static const DlogGroup toy = make_group("toy16", "e243");
  static const DlogGroup test = make_group("test128", "997f3819af113fcf196a2bd0d316a933");
  static const DlogGroup safe = make_group("safe256", "a9bdf788cd64a7bcb7599518b051007a77edf4b02a4b7c674ea19cb3bc12251f");
  if (name == toy.name) return toy;
  if (name == test.name) return test;
  if (name == safe.name) return safe;
  throw std::invalid_argument("unknown dlog group '" + std::string(name) + "'");
}

bool DlogGroup::is_element(const mpz_class& x) const {
  if (x <= 1 || x >= p) return false;
  return powm(x, q, p) == 1;
}

Bytes Ciphertext::body_encoding() const {
  Writer w;
  w.u8(static_cast<std::uint8_t>(backend)).bytes(label).bytes(ephemeral);
  w.u32(static_cast<std::uint32_t>(escrow.size()));
  for (const auto& e : escrow) w.raw(e);
  w.bytes(masked);
  return w.take();
}

Bytes Ciphertext::serialize() const {
  Writer w;
  w.raw(body_encoding()).digest(tag);
  return w.take();
}

Ciphertext Ciphertext::deserialize(ByteView in) {
  Reader r(in);
  Ciphertext c;
  std::uint8_t backend = r.u8();
  if (backend > 1) throw core::DecodeError("unknown ciphertext backend");
  c.backend = static_cast<Backend>(backend);
  c.label = r.bytes();
  c.ephemeral = r.bytes();
  std::uint32_t count = r.u32();
  if (count > 255) throw core::DecodeError("escrow too large");
  for (std::uint32_t i = 0; i < count; ++i) {
    Bytes e = r.raw(32);
    std::array<std::uint8_t, 32> a{};
    std::copy(e.begin(), e.end(), a.begin());
    c.escrow.push_back(a);
  }
  c.masked = r.bytes();
  c.tag = r.digest();
  r.expect_done();
  return c;
}

Digest Ciphertext::digest() const { return core::sha256(serialize()); }

Bytes DecryptionShare::serialize() const {
  Writer w;
  w.u32(holder).bytes(value).bytes(proof);
  return w.take();
}

DecryptionShare DecryptionShare::deserialize(ByteView in) {
  Reader r(in);
  DecryptionShare s;
  s.holder = r.u32();
  s.value = r.bytes();
  s.proof = r.bytes();
  r.expect_done();
  return s;
}

KeyMaterial generate(Backend backend, std::size_t n_holders, std::size_t k, std::uint64_t seed, std::string_view group) {
  if (n_holders == 0 || k < 1 || k > n_holders) {
    throw CryptoError(Code::parameter, "threshold requires 1 <= k <= n_holders (k=" + std::to_string(k) +
                                           ", n_holders=" + std::to_string(n_holders) + ")");
  }
  KeyMaterial km;
  km.backend = backend;
  km.n_holders = n_holders;
  km.k = k;
  km.pk.n_holders = km.vk.n_holders = n_holders;
  km.pk.k = km.vk.k = k;

  if (backend == Backend::mock) {
    if (n_holders > 255) throw CryptoError(Code::parameter, "mock backend supports at most 255 holders");
    Drbg rng(seed, "mock-dealer");
    MockPublicKey pk;
    MockVerificationKey vk;
    pk.nonce_key = rng.next();
    vk.dealer_mac_key = rng.next();
    for (std::uint32_t i = 1; i <= n_holders; ++i) {
      Digest pad = rng.next();
      pk.pad_keys.push_back(pad);
      vk.pad_keys.push_back(pad);
      km.sk.push_back(SecretKeyShare{i, MockSecretShare{pad, mock_holder_mac_key(vk.dealer_mac_key, i)}});
    }
    km.pk.scheme = std::move(pk);
    km.vk.scheme = std::move(vk);
    return km;
  }

  const DlogGroup& g = DlogGroup::named(group);
  if (n_holders >= g.q) throw CryptoError(Code::parameter, "more holders than the group order allows");
  Drbg rng(seed, "dlog-dealer:" + g.name);
  std::vector<mpz_class> poly;  // poly[0] is the secret
  for (std::size_t j = 0; j < k; ++j) poly.push_back(rng.scalar(g));

  DlogVerificationKey vk;
  vk.group = &g;
  vk.h = powm(g.g, poly[0], g.p);
  for (std::uint32_t i = 1; i <= n_holders; ++i) {
    mpz_class s = 0;
    for (std::size_t j = poly.size(); j-- > 0;) s = (s * i + poly[j]) % g.q;
    vk.commitments.push_back(powm(g.g, s, g.p));
    km.sk.push_back(SecretKeyShare{i, DlogSecretShare{&g, s}});
  }
  km.pk.scheme = DlogPublicKey{&g, vk.h};
  km.vk.scheme = std::move(vk);
  return km;
}

Ciphertext encrypt(const PublicKey& pk, ByteView m, ByteView label) {
  if (const auto* mock = std::get_if<MockPublicKey>(&pk.scheme)) return mock_encrypt(pk, *mock, m, label);

  const auto& key = std::get<DlogPublicKey>(pk.scheme);
  const DlogGroup& g = *key.group;
  Writer rw;
  rw.str("ephemeral").bytes(encode_fixed(key.h, g.element_bytes)).bytes(label).bytes(m);
  mpz_class r = hash_to_scalar(rw.data(), g.q - 1, g.scalar_bytes) + 1;

  Ciphertext c;
  c.backend = Backend::dlog;
  c.label.assign(label.begin(), label.end());
  c.ephemeral = encode_fixed(powm(g.g, r, g.p), g.element_bytes);
  Bytes key_material = encode_fixed(powm(key.h, r, g.p), g.element_bytes);
  c.masked = xor_bytes(m, keystream(key_material, label, m.size()));
  c.tag = tag_for(key_material, c);
  return c;
}

DecryptionShare share(const SecretKeyShare& sk, const Ciphertext& c) {
  if (const auto* mock = std::get_if<MockSecretShare>(&sk.scheme)) {
    if (c.backend != Backend::mock || sk.holder == 0 || sk.holder > c.escrow.size()) {
      throw CryptoError(Code::malformed, "ciphertext does not fit the mock key");
    }
    DecryptionShare s{sk.holder, mock_share_value(mock->pad_key, sk.holder, c), {}};
    s.proof = mock_share_proof(mock->mac_key, sk.holder, c, s.value);
    return s;
  }

  const auto& key = std::get<DlogSecretShare>(sk.scheme);
  const DlogGroup& g = *key.group;
  mpz_class u;
  if (c.backend != Backend::dlog || !valid_ephemeral(g, c, u)) {
    throw CryptoError(Code::malformed, "ciphertext does not fit the dlog key");
  }
  const Digest c_digest = c.digest();
  mpz_class sigma = powm(u, key.s, g.p);
  mpz_class commitment = powm(g.g, key.s, g.p);

  Writer nw;
  nw.str("dleq-nonce").bytes(encode_fixed(key.s, g.scalar_bytes)).digest(c_digest);
  mpz_class w = hash_to_scalar(nw.data(), g.q, g.scalar_bytes);
  mpz_class a1 = powm(g.g, w, g.p);
  mpz_class a2 = powm(u, w, g.p);
  mpz_class challenge =
      hash_to_scalar(dlog_transcript(g, sk.holder, commitment, u, sigma, a1, a2, c_digest), g.q, g.scalar_bytes);
  mpz_class z = (w + challenge * key.s) % g.q;

  DecryptionShare s;
  s.holder = sk.holder;
  s.value = encode_fixed(sigma, g.element_bytes);
  Writer pw;
  pw.raw(encode_fixed(challenge, g.scalar_bytes)).raw(encode_fixed(z, g.scalar_bytes));
  s.proof = pw.take();
  return s;
}

bool verify(const VerificationKey& vk, const Ciphertext& c, const DecryptionShare& s) {
  try {
    if (s.holder == 0 || s.holder > vk.n_holders) return false;

    if (const auto* mock = std::get_if<MockVerificationKey>(&vk.scheme)) {
      if (c.backend != Backend::mock || c.escrow.size() != vk.n_holders) return false;
      Bytes expected = mock_share_value(mock->pad_keys[s.holder - 1], s.holder, c);
      Bytes expected_proof =
          mock_share_proof(mock_holder_mac_key(mock->dealer_mac_key, s.holder), s.holder, c, expected);
      return constant_time_equal(s.value, expected) && constant_time_equal(s.proof, expected_proof);
    }

    const auto& key = std::get<DlogVerificationKey>(vk.scheme);
    const DlogGroup& g = *key.group;
    mpz_class u;
    if (c.backend != Backend::dlog || !valid_ephemeral(g, c, u)) return false;
    if (s.value.size() != g.element_bytes || s.proof.size() != 2 * g.scalar_bytes) return false;
    mpz_class sigma = decode_int(s.value);
    if (!g.is_element(sigma)) return false;
    ByteView proof(s.proof);
    mpz_class challenge = decode_int(proof.subspan(0, g.scalar_bytes));
    mpz_class z = decode_int(proof.subspan(g.scalar_bytes));
    if (challenge >= g.q || z >= g.q) return false;

    const mpz_class& commitment = key.commitments[s.holder - 1];
    const mpz_class neg = (g.q - challenge) % g.q;
    // g^z h_i^{-c} and u^z sigma^{-c} reproduce the prover's commitments.
    mpz_class a1 = (powm(g.g, z, g.p) * powm(commitment, neg, g.p)) % g.p;
    mpz_class a2 = (powm(u, z, g.p) * powm(sigma, neg, g.p)) % g.p;
    mpz_class expected =
        hash_to_scalar(dlog_transcript(g, s.holder, commitment, u, sigma, a1, a2, c.digest()), g.q, g.scalar_bytes);
    return expected == challenge;
  } catch (const std::exception&) {
    return false;
  }
}

Bytes combine(const VerificationKey& vk, const Ciphertext& c, std::span<const DecryptionShare> shares) {
  std::map<std::uint32_t, const DecryptionShare*> by_holder;
  for (const auto& s : shares) by_holder.emplace(s.holder, &s);
  if (by_holder.size() < vk.k) {
    throw CryptoError(Code::insufficient_shares, "need " + std::to_string(vk.k) + " shares from distinct holders, have " +
                                                     std::to_string(by_holder.size()));
  }
  for (const auto& s : shares) {
    if (!verify(vk, c, s)) throw CryptoError(Code::invalid_share, "share from holder " + std::to_string(s.holder) + " does not verify");
  }

  std::vector<const DecryptionShare*> chosen;
  for (const auto& [holder, s] : by_holder) {
    if (chosen.size() == vk.k) break;
    chosen.push_back(s);
  }

  Bytes key_material;
  if (std::holds_alternative<MockVerificationKey>(vk.scheme)) {
    key_material.resize(32);
    std::vector<std::pair<std::uint8_t, std::uint8_t>> points(chosen.size());
    for (std::size_t b = 0; b < 32; ++b) {
      for (std::size_t i = 0; i < chosen.size(); ++i) {
        points[i] = {static_cast<std::uint8_t>(chosen[i]->holder), chosen[i]->value[b]};
      }
      key_material[b] = gf256::interpolate_at_zero(points);
    }
  } else {
    const auto& key = std::get<DlogVerificationKey>(vk.scheme);
    const DlogGroup& g = *key.group;
    mpz_class acc = 1;
    for (const auto* si : chosen) {
      // lambda_i = prod_{j != i} j / (j - i) mod q
      mpz_class num = 1;
      mpz_class den = 1;
      for (const auto* sj : chosen) {
        if (sj == si) continue;
        num = (num * sj->holder) % g.q;
        mpz_class diff = mpz_class(sj->holder) - mpz_class(si->holder);
        diff %= g.q;
        if (diff < 0) diff += g.q;
        den = (den * diff) % g.q;
      }
      mpz_class lambda = (num * invert(den, g.q)) % g.q;
      acc = (acc * powm(decode_int(si->value), lambda, g.p)) % g.p;
    }
    key_material = encode_fixed(acc, g.element_bytes);
  }

  if (tag_for(key_material, c) != c.tag) throw CryptoError(Code::tag_mismatch, "ciphertext tag does not match");
  return xor_bytes(c.masked, keystream(key_material, c.label, c.masked.size()));
}

std::string to_hex(const PublicKey& pk) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(pk.backend())).u32(static_cast<std::uint32_t>(pk.n_holders)).u32(static_cast<std::uint32_t>(pk.k));
  if (const auto* mock = std::get_if<MockPublicKey>(&pk.scheme)) {
    w.digest(mock->nonce_key);
    for (const auto& p : mock->pad_keys) w.digest(p);
  } else {
    const auto& key = std::get<DlogPublicKey>(pk.scheme);
    w.str(key.group->name).bytes(encode_fixed(key.h, key.group->element_bytes));
  }
  return core::to_hex(w.data());
}

std::string to_hex(const VerificationKey& vk) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(vk.backend())).u32(static_cast<std::uint32_t>(vk.n_holders)).u32(static_cast<std::uint32_t>(vk.k));
  if (const auto* mock = std::get_if<MockVerificationKey>(&vk.scheme)) {
    w.digest(mock->dealer_mac_key);
    for (const auto& p : mock->pad_keys) w.digest(p);
  } else {
    const auto& key = std::get<DlogVerificationKey>(vk.scheme);
    w.str(key.group->name).bytes(encode_fixed(key.h, key.group->element_bytes));
    for (const auto& h : key.commitments) w.bytes(encode_fixed(h, key.group->element_bytes));
  }
  return core::to_hex(w.data());
}

std::string to_hex(const Ciphertext& c) { return core::to_hex(c.serialize()); }

std::string to_hex(const DecryptionShare& s) { return core::to_hex(s.serialize()); }

}  // namespace strongchain::crypto
