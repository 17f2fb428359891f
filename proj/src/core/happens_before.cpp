#include "strongchain/core/happens_before.hpp"

#include <algorithm>
#include <cstdint>

namespace strongchain::core {

void HappensBefore::insert(std::span<const TraceEvent> events) {
  for (const auto& ev : events) {
    if (ev.kind == EventKind::send) {
      if (!ev.message) throw CausalityError("send event without message id");
      if (index_.count(*ev.message)) throw CausalityError("message sent twice: " + ev.message->str());
      if (ev.message->sender != ev.process) {
        throw CausalityError("send stamped for " + ev.process.str() + " carries id of " + ev.message->sender.str());
      }
      const std::size_t idx = ids_.size();
      ids_.push_back(*ev.message);
      index_.emplace(*ev.message, idx);

      auto& f = frontier_[ev.process];
      std::vector<std::size_t> preds = std::move(f.delivered_since);
      if (f.last_send) preds.push_back(*f.last_send);
      std::sort(preds.begin(), preds.end());
      preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
      preds_.push_back(std::move(preds));
      f.last_send = idx;
      f.delivered_since.clear();
    } else if (ev.kind == EventKind::deliver) {
      if (!ev.message) throw CausalityError("deliver event without message id");
      auto it = index_.find(*ev.message);
      if (it == index_.end()) throw CausalityError("deliver of unsent message " + ev.message->str());
      frontier_[ev.process].delivered_since.push_back(it->second);
    }
  }
}

std::size_t HappensBefore::edge_count() const {
  std::size_t total = 0;
  for (const auto& p : preds_) total += p.size();
  return total;
}

std::size_t HappensBefore::index_of(const MessageId& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) throw std::out_of_range("unknown message " + m.str());
  return it->second;
}

bool HappensBefore::precedes(const MessageId& m1, const MessageId& m2) const {
  const std::size_t from = index_of(m1);
  const std::size_t to = index_of(m2);
  if (from >= to) return false;
  std::vector<bool> seen(to + 1, false);
  std::vector<std::size_t> stack{to};
  seen[to] = true;
  while (!stack.empty()) {
    std::size_t cur = stack.back();
    stack.pop_back();
    for (std::size_t p : preds_[cur]) {
      if (p == from) return true;
      if (p < from || seen[p]) continue;
      seen[p] = true;
      stack.push_back(p);
    }
  }
  return false;
}

std::vector<MessageId> HappensBefore::direct_predecessors(const MessageId& m) const {
  std::vector<MessageId> out;
  for (std::size_t p : preds_[index_of(m)]) out.push_back(ids_[p]);
  return out;
}

std::vector<std::vector<bool>> HappensBefore::past_membership(std::span<const MessageId> tracked,
                                                              std::span<const MessageId> targets) const {
  const std::size_t words = (tracked.size() + 63) / 64;
  std::vector<std::int64_t> slot(ids_.size(), -1);
  for (std::size_t j = 0; j < tracked.size(); ++j) slot[index_of(tracked[j])] = static_cast<std::int64_t>(j);

  // Forward pass in index order; preds always have lower indices.
  std::vector<std::uint64_t> past(ids_.size() * words, 0);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    std::uint64_t* row = &past[i * words];
    for (std::size_t p : preds_[i]) {
      const std::uint64_t* prow = &past[p * words];
      for (std::size_t w = 0; w < words; ++w) row[w] |= prow[w];
      if (slot[p] >= 0) row[slot[p] / 64] |= std::uint64_t{1} << (slot[p] % 64);
    }
  }

  std::vector<std::vector<bool>> out;
  out.reserve(targets.size());
  for (const auto& target : targets) {
    const std::uint64_t* row = &past[index_of(target) * words];
    std::vector<bool> bits(tracked.size());
    for (std::size_t j = 0; j < tracked.size(); ++j) bits[j] = (row[j / 64] >> (j % 64)) & 1;
    out.push_back(std::move(bits));
  }
  return out;
}

HappensBefore hb_insert(HappensBefore hb, std::span<const TraceEvent> events) {
  hb.insert(events);
  return hb;
}

bool hb_tx(const HappensBefore& hb, const Digest& t1, const Digest& t2, const std::map<Digest, MessageId>& envelope) {
  auto e1 = envelope.find(t1);
  auto e2 = envelope.find(t2);
  if (e1 == envelope.end() || e2 == envelope.end()) throw std::out_of_range("transaction without envelope message");
  return hb.precedes(e1->second, e2->second);
}

}  // namespace strongchain::core
