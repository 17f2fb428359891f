#include "strongchain/core/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

namespace strongchain::core {

Digest sha256(ByteView data) {
  Digest d;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), d.bytes.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
    throw std::runtime_error("EVP_Digest(sha256) failed");
  }
  return d;
}

Digest sha256(std::string_view data) {
  return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Digest hmac_sha256(ByteView key, ByteView data) {
  Digest d;
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), d.bytes.data(), &len) ==
          nullptr ||
      len != 32) {
    throw std::runtime_error("HMAC(sha256) failed");
  }
  return d;
}

}  // namespace strongchain::core
