#include "strongchain/core/wire.hpp"

namespace strongchain::core {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string tag_of(const Body& body) {
  return std::visit(overloaded{
                        [](const BrbMessage& m) -> std::string {
                          switch (m.phase) {
                            case BrbPhase::init: return "INIT";
                            case BrbPhase::echo: return "ECHO";
                            case BrbPhase::ready: return "READY";
                          }
                          return "BRB";
                        },
                        [](const ShareMessage&) -> std::string { return "SHARE"; },
                        [](const ProposeMessage&) -> std::string { return "PROPOSE"; },
                        [](const VoteMessage&) -> std::string { return "VOTE"; },
                        [](const ForwardMessage&) -> std::string { return "FORWARD"; },
                        [](const NoteMessage&) -> std::string { return "NOTE"; },
                    },
                    body);
}

std::optional<MessageId> instance_of(const Body& body) {
  if (const auto* b = std::get_if<BrbMessage>(&body)) return b->instance;
  if (const auto* s = std::get_if<ShareMessage>(&body)) return s->instance;
  return std::nullopt;
}

}  // namespace strongchain::core
