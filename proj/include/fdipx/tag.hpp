/*
 * Tag compression: a full BTB tag of known width is reduced to 16 bits by
 * keeping the low 8 bits verbatim and XOR-folding the remaining bits in
 * 8-bit blocks (the topmost partial block zero-extended).
 */
#pragma once

#include <cassert>
#include <cstdint>

namespace fdipx {

constexpr std::uint16_t compress_tag(std::uint64_t full_tag, unsigned full_width) {
  assert(full_width >= 16 && full_width <= 64);
  if (full_width < 64) full_tag &= (std::uint64_t{1} << full_width) - 1;
  const std::uint8_t low = static_cast<std::uint8_t>(full_tag & 0xff);
  const unsigned rest_bits = full_width - 8;
  const std::uint64_t rest = full_tag >> 8;
  std::uint8_t high = 0;
  for (unsigned shift = 0; shift < rest_bits; shift += 8)
    high ^= static_cast<std::uint8_t>((rest >> shift) & 0xff);
  return static_cast<std::uint16_t>((static_cast<std::uint16_t>(high) << 8) | low);
}

}  // namespace fdipx
