#include <doctest.h>

#include <random>

#include "crypto/gf256.hpp"
#include "strongchain/crypto/threshold.hpp"

using namespace strongchain;
using namespace strongchain::crypto;

namespace {

Bytes random_bytes(std::mt19937_64& rng, std::size_t max_len) {
  Bytes b(std::uniform_int_distribution<std::size_t>(0, max_len)(rng));
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

std::vector<DecryptionShare> all_shares(const KeyMaterial& km, const Ciphertext& c) {
  std::vector<DecryptionShare> out;
  for (const auto& sk : km.sk) out.push_back(share(sk, c));
  return out;
}

/// Every k-subset of {0..n-1}, by bitmask.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("GF(256) arithmetic") {
  CHECK(gf256::mul(0x57, 0x83) == 0xc1);  // FIPS-197 worked example
  for (int a = 1; a < 256; ++a) CHECK(gf256::mul(static_cast<std::uint8_t>(a), gf256::inv(static_cast<std::uint8_t>(a))) == 1);
  const std::uint8_t coeffs[] = {0x11, 0xa7};
  std::vector<std::pair<std::uint8_t, std::uint8_t>> pts;
  for (std::uint8_t x : {3, 9, 200}) pts.emplace_back(x, gf256::eval(0x42, coeffs, x));
  CHECK(gf256::interpolate_at_zero(pts) == 0x42);
}

TEST_CASE("key generation validates parameters and is deterministic") {
  CHECK_THROWS_AS(generate(Backend::mock, 4, 0, 1), CryptoError);
  CHECK_THROWS_AS(generate(Backend::mock, 4, 5, 1), CryptoError);
  CHECK_THROWS_AS(generate(Backend::mock, 256, 3, 1), CryptoError);
  CHECK_THROWS_AS(generate(Backend::dlog, 4, 3, 1, "nope"), std::invalid_argument);
  CHECK(to_hex(generate(Backend::dlog, 4, 3, 9).pk) == to_hex(generate(Backend::dlog, 4, 3, 9).pk));
  CHECK(to_hex(generate(Backend::dlog, 4, 3, 9).pk) != to_hex(generate(Backend::dlog, 4, 3, 10).pk));
  CHECK(parse_backend("dlog") == Backend::dlog);
  CHECK_THROWS_AS(parse_backend("rsa"), std::invalid_argument);
}

TEST_CASE("named groups are safe-prime groups") {
  for (auto name : {"toy16", "test128", "safe256"}) {
    const auto& g = DlogGroup::named(name);
    CHECK(g.p == 2 * g.q + 1);
    CHECK(mpz_probab_prime_p(g.p.get_mpz_t(), 30) > 0);
    CHECK(mpz_probab_prime_p(g.q.get_mpz_t(), 30) > 0);
    CHECK(g.is_element(g.g));
    mpz_class one;
    mpz_powm(one.get_mpz_t(), g.g.get_mpz_t(), g.q.get_mpz_t(), g.p.get_mpz_t());
    CHECK(one == 1);
  }
}


TEST_CASE("round trip, subsets and k-1 failure for both backends") {
  for (Backend backend : {Backend::mock, Backend::dlog}) {
    CAPTURE(to_string(backend));
    for (auto [n, k] : {std::pair<std::size_t, std::size_t>{4, 3}, {7, 5}}) {
      const auto km = generate(backend, n, k, 77);
      const Bytes msg = core::to_bytes("pay 10 to bob");
      const Bytes label = core::to_bytes("c5/tx:0");
      const auto c = encrypt(km.pk, msg, label);
      const auto shares = all_shares(km, c);
      for (const auto& s : shares) CHECK(verify(km.vk, c, s));
      for (const auto& subset : subsets(n, k)) {
        std::vector<DecryptionShare> pick;
        for (auto i : subset) pick.push_back(shares[i]);
        CHECK(combine(km.vk, c, pick) == msg);
      }
      for (const auto& subset : subsets(n, k - 1)) {
        std::vector<DecryptionShare> pick;
        for (auto i : subset) pick.push_back(shares[i]);
        CHECK_THROWS_AS(combine(km.vk, c, pick), CryptoError);
      }
      // Duplicates do not count toward k.
      std::vector<DecryptionShare> dup(k, shares[0]);
      CHECK_THROWS_AS(combine(km.vk, c, dup), CryptoError);
    }
  }
}

TEST_CASE("fuzzed plaintexts round trip") {
  std::mt19937_64 rng(5);
  for (Backend backend : {Backend::mock, Backend::dlog}) {
    const auto km = generate(backend, 4, 3, 3);
    for (int i = 0; i < 100; ++i) {
      const Bytes m = random_bytes(rng, 300);
      const Bytes l = random_bytes(rng, 20);
      const auto c = encrypt(km.pk, m, l);
      auto shares = all_shares(km, c);
      std::shuffle(shares.begin(), shares.end(), rng);
      shares.resize(3);
      CHECK(combine(km.vk, c, shares) == m);
      CHECK(Ciphertext::deserialize(c.serialize()) == c);
      CHECK(DecryptionShare::deserialize(shares[0].serialize()) == shares[0]);
    }
  }
}

TEST_CASE("forged and mismatched shares are rejected") {
  std::mt19937_64 rng(11);
  for (Backend backend : {Backend::mock, Backend::dlog}) {
    CAPTURE(to_string(backend));
    const auto km = generate(backend, 4, 3, 21);
    const auto other = generate(backend, 4, 3, 22);
    const auto c = encrypt(km.pk, core::to_bytes("secret"), core::to_bytes("L"));
    const auto c2 = encrypt(km.pk, core::to_bytes("other"), core::to_bytes("L"));
    const auto good = share(km.sk[0], c);

    auto flipped = good;
    flipped.value[0] ^= 1;
    CHECK_FALSE(verify(km.vk, c, flipped));
    auto bad_proof = good;
    bad_proof.proof.back() ^= 0x80;
    CHECK_FALSE(verify(km.vk, c, bad_proof));
    auto wrong_holder = good;
    wrong_holder.holder = 2;
    CHECK_FALSE(verify(km.vk, c, wrong_holder));
    CHECK_FALSE(verify(km.vk, c2, good));                      // share for another ciphertext
    CHECK_FALSE(verify(km.vk, c, share(other.sk[0], c)));      // share under another dealer
    auto oob = good;
    oob.holder = 9;
    CHECK_FALSE(verify(km.vk, c, oob));
    for (int i = 0; i < 200; ++i) {
      DecryptionShare f{static_cast<std::uint32_t>(1 + rng() % 4), random_bytes(rng, 40), random_bytes(rng, 64)};
      CHECK_FALSE(verify(km.vk, c, f));
    }

    // One invalid share poisons combine.
    auto shares = all_shares(km, c);
    shares[1] = flipped;
    shares[1].holder = 2;
    CHECK_THROWS_AS(combine(km.vk, c, std::span(shares).first(3)), CryptoError);
  }
}

TEST_CASE("ciphertext tampering is detected by the tag") {
  for (Backend backend : {Backend::mock, Backend::dlog}) {
    const auto km = generate(backend, 4, 3, 8);
    auto c = encrypt(km.pk, core::to_bytes("abc"), core::to_bytes("L"));
    c.masked[0] ^= 1;
    auto shares = all_shares(km, c);
    try {
      combine(km.vk, c, shares);
      FAIL("tampered ciphertext decrypted");
    } catch (const CryptoError& e) {
      CHECK(e.code() == CryptoError::Code::tag_mismatch);
    }
    auto relabeled = encrypt(km.pk, core::to_bytes("abc"), core::to_bytes("L"));
    relabeled.label = core::to_bytes("M");
    CHECK_THROWS_AS(combine(km.vk, relabeled, all_shares(km, relabeled)), CryptoError);
  }
}

TEST_CASE("encryption is deterministic in (PK, m, L) and label binding") {
  const auto km = generate(Backend::dlog, 4, 3, 1);
  const auto m = core::to_bytes("x");
  CHECK(encrypt(km.pk, m, core::to_bytes("a")) == encrypt(km.pk, m, core::to_bytes("a")));
  CHECK_FALSE(encrypt(km.pk, m, core::to_bytes("a")) == encrypt(km.pk, m, core::to_bytes("b")));
}

TEST_CASE("malformed wire data") {
  CHECK_THROWS_AS(Ciphertext::deserialize(core::to_bytes("junk")), core::DecodeError);
  CHECK_THROWS_AS(DecryptionShare::deserialize(Bytes{}), core::DecodeError);
  const auto mock = generate(Backend::mock, 4, 3, 1);
  const auto dlog = generate(Backend::dlog, 4, 3, 1);
  const auto c = encrypt(mock.pk, core::to_bytes("x"), {});
  CHECK_THROWS_AS(share(dlog.sk[0], c), CryptoError);
  CHECK_FALSE(verify(dlog.vk, c, share(mock.sk[0], c)));
}
