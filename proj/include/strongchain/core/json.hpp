#pragma once

#include <json.hpp>

#include "strongchain/core/types.hpp"

namespace strongchain::core {

/// {"txid","client","nonce","payload" (hex),"fee"}.
nlohmann::json tx_to_json(const Transaction& tx);
/// Throws DecodeError when a present txid disagrees with the fields.
Transaction tx_from_json(const nlohmann::json& j);

}  // namespace strongchain::core
