#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace strongchain::crypto::gf256 {

// GF(2^8) with the AES reduction polynomial x^8 + x^4 + x^3 + x + 1.

std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);  // a != 0

/// Evaluates secret + c_1 x + ... + c_{k-1} x^{k-1} at x.
std::uint8_t eval(std::uint8_t secret, std::span<const std::uint8_t> coeffs, std::uint8_t x);

/// Lagrange interpolation at zero from (x_i, y_i) with distinct nonzero x_i.
std::uint8_t interpolate_at_zero(std::span<const std::pair<std::uint8_t, std::uint8_t>> points);

}  // namespace strongchain::crypto::gf256
