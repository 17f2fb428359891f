#include "gf256.hpp"

namespace strongchain::crypto::gf256 {

namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};

  Tables() {
    std::uint8_t x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = x;
      log[x] = static_cast<std::uint8_t>(i);
      // multiply by the generator 3
      std::uint8_t hi = x & 0x80;
      std::uint8_t x2 = static_cast<std::uint8_t>(x << 1);
      if (hi) x2 ^= 0x1b;
      x = static_cast<std::uint8_t>(x2 ^ x);
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

std::uint8_t inv(std::uint8_t a) {
  const auto& t = tables();
  return t.exp[255 - t.log[a]];
}

std::uint8_t eval(std::uint8_t secret, std::span<const std::uint8_t> coeffs, std::uint8_t x) {
  // Horner from the top coefficient down.
  std::uint8_t acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = static_cast<std::uint8_t>(mul(acc, x) ^ coeffs[i]);
  return static_cast<std::uint8_t>(mul(acc, x) ^ secret);
}

std::uint8_t interpolate_at_zero(std::span<const std::pair<std::uint8_t, std::uint8_t>> points) {
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::uint8_t num = 1;
    std::uint8_t den = 1;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      // (0 - x_j) / (x_i - x_j); subtraction is xor
      num = mul(num, points[j].first);
      den = mul(den, static_cast<std::uint8_t>(points[i].first ^ points[j].first));
    }
    acc ^= mul(points[i].second, mul(num, inv(den)));
  }
  return acc;
}

}  // namespace strongchain::crypto::gf256
