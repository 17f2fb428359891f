#pragma once

#include <optional>
#include <string>
#include <variant>

#include "strongchain/core/block.hpp"

namespace strongchain::core {

enum class BrbPhase : std::uint8_t { init, echo, ready };

/// INIT and ECHO carry the payload; READY carries only the digest.
struct BrbMessage {
  BrbPhase phase = BrbPhase::init;
  MessageId instance;
  Digest digest;
  Bytes payload;
};

/// Decryption share for a BRB-delivered ciphertext; `share` is the serialized
/// crypto::DecryptionShare (holder ‖ value ‖ proof).
struct ShareMessage {
  MessageId instance;
  std::uint32_t holder = 0;
  Bytes share;
};

struct ProposeMessage {
  std::uint64_t slot = 0;
  Block block;
};

struct VoteMessage {
  std::uint64_t slot = 0;
  Digest block_hash;
  bool accept = false;
};

/// Plaintext handed from a Byzantine miner to a colluding client.
struct ForwardMessage {
  Transaction tx;
};

/// Free-form body for engine-level tests and scripted processes.
struct NoteMessage {
  std::string text;
};

using Body = std::variant<BrbMessage, ShareMessage, ProposeMessage, VoteMessage, ForwardMessage, NoteMessage>;

/// "INIT", "ECHO", "READY", "SHARE", "PROPOSE", "VOTE", "FORWARD", "NOTE".
std::string tag_of(const Body& body);
/// Broadcast instance the body belongs to, for BRB phases and shares.
std::optional<MessageId> instance_of(const Body& body);

}  // namespace strongchain::core
