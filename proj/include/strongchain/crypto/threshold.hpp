#pragma once

#include <gmpxx.h>

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "strongchain/core/bytes.hpp"

namespace strongchain::crypto {

using core::ByteView;
using core::Bytes;
using core::Digest;

// Non-interactive (k, n) threshold encryption with a trusted dealer:
//   generate -> KeyMaterial{PK, VK, SK_1..SK_n}
//   encrypt(PK, m, L) -> C            share(SK_i, C) -> sigma_i
//   verify(VK, C, sigma_i) -> bool    combine(VK, C, S) -> m   (|S| >= k)
//
// Two backends share the interface:
//   dlog  threshold ElGamal KEM over a prime-order subgroup of Z_p^*, shares
//         u^{s_i} with Chaum-Pedersen proofs against h_i = g^{s_i};
//   mock  per-ciphertext key split with Shamir over GF(2^8), escrowed to the
//         holders under dealer pads, MAC-authenticated shares.
// Both wrap the payload the same way: keystream = SHA-256 counter mode over the
// recovered key material and label, tag = HMAC over the whole ciphertext body.

enum class Backend : std::uint8_t { mock = 0, dlog = 1 };

std::string to_string(Backend b);
/// "mock" | "dlog"; throws std::invalid_argument.
Backend parse_backend(std::string_view s);

/// Safe-prime group p = 2q + 1 with g generating the order-q subgroup.
struct DlogGroup {
  std::string name;
  mpz_class p;
  mpz_class q;
  mpz_class g;
  std::size_t element_bytes = 0;
  std::size_t scalar_bytes = 0;

  /// "toy16", "test128" (default), "safe256". Throws std::invalid_argument.
  static const DlogGroup& named(std::string_view name);
  bool is_element(const mpz_class& x) const;
};

inline constexpr std::string_view kDefaultGroup = "test128";

class CryptoError : public std::runtime_error {
 public:
  enum class Code { parameter, malformed, insufficient_shares, invalid_share, tag_mismatch };

  CryptoError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct MockPublicKey {
  std::vector<Digest> pad_keys;  // dealer escrow, one per holder
  Digest nonce_key;
};
struct DlogPublicKey {
  const DlogGroup* group = nullptr;
  mpz_class h;  // g^s
};

struct MockVerificationKey {
  std::vector<Digest> pad_keys;
  Digest dealer_mac_key;
};
struct DlogVerificationKey {
  const DlogGroup* group = nullptr;
  mpz_class h;
  std::vector<mpz_class> commitments;  // h_i = g^{s_i}, index i-1
};

struct MockSecretShare {
  Digest pad_key;
  Digest mac_key;
};
struct DlogSecretShare {
  const DlogGroup* group = nullptr;
  mpz_class s;
};

struct PublicKey {
  std::size_t n_holders = 0;
  std::size_t k = 0;
  std::variant<MockPublicKey, DlogPublicKey> scheme;
  Backend backend() const { return static_cast<Backend>(scheme.index()); }
};

struct VerificationKey {
  std::size_t n_holders = 0;
  std::size_t k = 0;
  std::variant<MockVerificationKey, DlogVerificationKey> scheme;
  Backend backend() const { return static_cast<Backend>(scheme.index()); }
};

struct SecretKeyShare {
  std::uint32_t holder = 0;  // 1-based
  std::variant<MockSecretShare, DlogSecretShare> scheme;
};

struct KeyMaterial {
  Backend backend = Backend::mock;
  std::size_t n_holders = 0;
  std::size_t k = 0;
  PublicKey pk;
  VerificationKey vk;
  std::vector<SecretKeyShare> sk;  // sk[i-1] belongs to holder i
};

struct Ciphertext {
  Backend backend = Backend::mock;
  Bytes label;
  Bytes ephemeral;                                 // dlog: u = g^r, fixed width
  std::vector<std::array<std::uint8_t, 32>> escrow;  // mock: per-holder masked key shares
  Bytes masked;
  Digest tag;

  /// Everything except the tag, canonically encoded; the tag authenticates it.
  Bytes body_encoding() const;
  Bytes serialize() const;
  /// Throws core::DecodeError.
  static Ciphertext deserialize(ByteView in);
  Digest digest() const;

  bool operator==(const Ciphertext&) const = default;
};

struct DecryptionShare {
  std::uint32_t holder = 0;
  Bytes value;
  Bytes proof;

  Bytes serialize() const;
  static DecryptionShare deserialize(ByteView in);

  bool operator==(const DecryptionShare&) const = default;
};

/// Trusted-dealer setup, deterministic in seed. Throws CryptoError(parameter)
/// unless 1 <= k <= n_holders (and n_holders <= 255 for the mock backend).
KeyMaterial generate(Backend backend, std::size_t n_holders, std::size_t k, std::uint64_t seed,
                     std::string_view group = kDefaultGroup);

/// Deterministic in (PK, m, L): the ephemeral randomness is derived from them.
Ciphertext encrypt(const PublicKey& pk, ByteView m, ByteView label);

/// Throws CryptoError(malformed) when C does not fit the key's backend.
DecryptionShare share(const SecretKeyShare& sk, const Ciphertext& c);

/// Never throws; anything malformed verifies as false.
bool verify(const VerificationKey& vk, const Ciphertext& c, const DecryptionShare& s);

/// Throws CryptoError: insufficient_shares (fewer than k distinct holders),
/// invalid_share (any share fails verify), tag_mismatch.
Bytes combine(const VerificationKey& vk, const Ciphertext& c, std::span<const DecryptionShare> shares);

std::string to_hex(const PublicKey& pk);
std::string to_hex(const VerificationKey& vk);
std::string to_hex(const Ciphertext& c);
std::string to_hex(const DecryptionShare& s);

}  // namespace strongchain::crypto
