#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace strongchain::core {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// 32-byte digest. The zero digest doubles as the genesis sentinel.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  bool is_zero() const;
  std::string hex() const;
  static Digest from_hex(std::string_view hex);

  auto operator<=>(const Digest&) const = default;
};

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);
Bytes to_bytes(std::string_view s);
std::string to_string(ByteView data);

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical encoding: big-endian integers, u32 length prefix for variable
// fields, fields in declaration order.
class Writer {
 public:
  Writer& u8(std::uint8_t v);
  Writer& u32(std::uint32_t v);
  Writer& u64(std::uint64_t v);
  Writer& raw(ByteView v);
  Writer& bytes(ByteView v);
  Writer& str(std::string_view v);
  Writer& digest(const Digest& d);

  const Bytes& data() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  Bytes raw(std::size_t n);
  Bytes bytes();
  std::string str();
  Digest digest();

  bool done() const { return pos_ == in_.size(); }
  void expect_done() const;

 private:
  ByteView need(std::size_t n);

  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace strongchain::core
