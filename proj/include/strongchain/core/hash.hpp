#pragma once

#include "strongchain/core/bytes.hpp"

namespace strongchain::core {

/// Name recorded in run metadata for the digest function used everywhere.
inline constexpr std::string_view kDigestName = "sha256";

Digest sha256(ByteView data);
Digest sha256(std::string_view data);
Digest hmac_sha256(ByteView key, ByteView data);

}  // namespace strongchain::core
