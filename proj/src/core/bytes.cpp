#include "strongchain/core/bytes.hpp"

#include <algorithm>

namespace strongchain::core {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

bool Digest::is_zero() const {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

std::string Digest::hex() const { return to_hex(bytes); }

Digest Digest::from_hex(std::string_view hex) {
  Bytes raw = core::from_hex(hex);
  if (raw.size() != 32) throw DecodeError("digest must be 32 bytes, got " + std::to_string(raw.size()));
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

std::string to_hex(ByteView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

std::string to_string(ByteView data) { return std::string(data.begin(), data.end()); }

Writer& Writer::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

Writer& Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::raw(ByteView v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

Writer& Writer::bytes(ByteView v) {
  if (v.size() > 0xffffffffu) throw std::length_error("field exceeds u32 length prefix");
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

Writer& Writer::str(std::string_view v) {
  return bytes(ByteView(reinterpret_cast<const std::uint8_t*>(v.data()), v.size()));
}

Writer& Writer::digest(const Digest& d) { return raw(d.bytes); }

ByteView Reader::need(std::size_t n) {
  if (in_.size() - pos_ < n) throw DecodeError("truncated input");
  ByteView v = in_.subspan(pos_, n);
  pos_ += n;
  return v;
}

std::uint8_t Reader::u8() { return need(1)[0]; }

std::uint32_t Reader::u32() {
  ByteView v = need(4);
  std::uint32_t out = 0;
  for (std::uint8_t b : v) out = (out << 8) | b;
  return out;
}

std::uint64_t Reader::u64() {
  ByteView v = need(8);
  std::uint64_t out = 0;
  for (std::uint8_t b : v) out = (out << 8) | b;
  return out;
}

Bytes Reader::raw(std::size_t n) {
  ByteView v = need(n);
  return Bytes(v.begin(), v.end());
}

Bytes Reader::bytes() { return raw(u32()); }

std::string Reader::str() {
  Bytes b = bytes();
  return std::string(b.begin(), b.end());
}

Digest Reader::digest() {
  ByteView v = need(32);
  Digest d;
  std::copy(v.begin(), v.end(), d.bytes.begin());
  return d;
}

void Reader::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes after decode");
}

}  // namespace strongchain::core
