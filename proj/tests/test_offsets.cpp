// Offset math and partition selection, checked against brute-force oracles.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fdipx/geometry.hpp"
#include "fdipx/types.hpp"

using namespace fdipx;

namespace {

// Oracle: smallest N such that magnitude <= 2^N - 1, by direct scan.
unsigned min_bits_oracle(std::uint64_t magnitude) {
  for (unsigned n = 0; n < 64; ++n) {
    const std::uint64_t cap = (n >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    if (magnitude <= cap) return n;
  }
  return 64;
}

// Oracle: try each field width in ascending order; first fit wins.
int partition_oracle(BranchKind kind, const SignedOffset& off) {
  if (kind == BranchKind::Return) return 0;
  if (is_indirect(kind)) return 3;
  for (int p = 0; p < 4; ++p)
    if (min_bits_oracle(off.magnitude) <= kPartitionOffsetBits[p]) return p;
  return -1;
}

addr_t random_iaddr(std::mt19937_64& rng) {
  return rng() & (kVaLimit - 1) & ~addr_t{3};
}

}  // namespace

TEST_CASE("offset of a short backward branch") {
  const auto off = compute_offset(0x2000, 0x1800);
  CHECK(off.magnitude == 512);
  CHECK(off.backward);
  CHECK(min_offset_bits(off) == 10);
}

TEST_CASE("self-branch is magnitude zero forward") {
  const auto off = compute_offset(0x4000, 0x4000);
  CHECK(off.magnitude == 0);
  CHECK_FALSE(off.backward);
  CHECK(min_offset_bits(off) == 0);
}

TEST_CASE("field width boundaries are exact") {
  CHECK(min_offset_bits({255, false}) == 8);
  CHECK(min_offset_bits({256, false}) == 9);
  CHECK(min_offset_bits({8191, true}) == 13);
  CHECK(min_offset_bits({8192, true}) == 14);
  CHECK(min_offset_bits({(1ull << 23) - 1, false}) == 23);
  CHECK(min_offset_bits({1ull << 23, false}) == 24);
}

TEST_CASE("min_offset_bits matches the scan oracle on random magnitudes") {
  std::mt19937_64 rng{0x0ff5e75};
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t mag = rng() & ((std::uint64_t{1} << 46) - 1);
    CHECK(min_offset_bits({mag, false}) == min_bits_oracle(mag));
  }
}

TEST_CASE("offsets round-trip through apply_offset") {
  std::mt19937_64 rng{0xa11a};
  for (int i = 0; i < 20000; ++i) {
    const addr_t pc = random_iaddr(rng);
    const addr_t target = random_iaddr(rng);
    CHECK(apply_offset(pc, compute_offset(pc, target)) == target);
  }
}

TEST_CASE("partition selection: kind routing") {
  CHECK(select_partition(BranchKind::Return, {}) == 0);
  CHECK(select_partition(BranchKind::IndirectJump, {}) == 3);
  CHECK(select_partition(BranchKind::IndirectCall, {}) == 3);
  // A short direct call still goes by offset, not by kind.
  CHECK(select_partition(BranchKind::CallDirect, {17, false}) == 0);
}

TEST_CASE("partition selection: width boundaries") {
  using BK = BranchKind;
  CHECK(select_partition(BK::ConditionalDirect, {0, false}) == 0);
  CHECK(select_partition(BK::ConditionalDirect, {255, true}) == 0);
  CHECK(select_partition(BK::ConditionalDirect, {256, false}) == 1);
  CHECK(select_partition(BK::UnconditionalDirect, {8191, false}) == 1);
  CHECK(select_partition(BK::UnconditionalDirect, {8192, true}) == 2);
  CHECK(select_partition(BK::CallDirect, {(1ull << 23) - 1, false}) == 2);
  CHECK(select_partition(BK::CallDirect, {1ull << 23, false}) == 3);
  CHECK(select_partition(BK::ConditionalDirect, {(1ull << 46) - 1, true}) == 3);
}

TEST_CASE("partition index is monotone in offset magnitude") {
  std::mt19937_64 rng{0x90210};
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t a = rng() & ((std::uint64_t{1} << 46) - 1);
    const std::uint64_t b = rng() & ((std::uint64_t{1} << 46) - 1);
    const std::uint64_t lo = std::min(a, b), hi = std::max(a, b);
    CHECK(select_partition(BranchKind::ConditionalDirect, {lo, false}) <=
          select_partition(BranchKind::ConditionalDirect, {hi, false}));
  }
}

TEST_CASE("partition selection agrees with the ascending-width oracle") {
  std::mt19937_64 rng{0x5e1ec7};
  int disagreements = 0;
  for (int i = 0; i < 20000; ++i) {
    const addr_t pc = random_iaddr(rng);
    const addr_t target = random_iaddr(rng);
    const auto off = compute_offset(pc, target);
    if (select_partition(BranchKind::ConditionalDirect, off) !=
        partition_oracle(BranchKind::ConditionalDirect, off))
      ++disagreements;
  }
  CHECK(disagreements == 0);
}
