/*
 * Shared address and branch-kind vocabulary.
 *
 * Addresses are 48-bit virtual, word (4-byte) aligned; branch offsets are
 * measured in instruction words, so a word index fits in 46 bits.
 */
#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fdipx {

using addr_t = std::uint64_t;

inline constexpr unsigned kVaBits = 48;
inline constexpr unsigned kWordIndexBits = 46;
inline constexpr addr_t kVaLimit = addr_t{1} << kVaBits;

constexpr bool is_word_aligned(addr_t a) { return (a & 0x3) == 0; }
constexpr bool is_valid_iaddr(addr_t a) { return a < kVaLimit && is_word_aligned(a); }
constexpr addr_t word_index(addr_t a) { return a >> 2; }

// Errors thrown at the tool boundary; the CLI maps these to exit codes.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct CheckFailure : std::runtime_error {
  explicit CheckFailure(const std::string& what) : std::runtime_error(what) {}
};

enum class BranchKind : std::uint8_t {
  NotABranch = 0,
  ConditionalDirect = 1,
  UnconditionalDirect = 2,
  CallDirect = 3,
  Return = 4,
  IndirectJump = 5,
  IndirectCall = 6,
};

inline constexpr unsigned kBranchKindCount = 7;

constexpr bool is_branch(BranchKind k) { return k != BranchKind::NotABranch; }

constexpr bool is_direct(BranchKind k) {
  return k == BranchKind::ConditionalDirect || k == BranchKind::UnconditionalDirect ||
         k == BranchKind::CallDirect;
}

constexpr bool is_indirect(BranchKind k) {
  return k == BranchKind::IndirectJump || k == BranchKind::IndirectCall;
}

constexpr bool is_call(BranchKind k) {
  return k == BranchKind::CallDirect || k == BranchKind::IndirectCall;
}

// Every branch except a conditional must be taken in a well-formed trace.
constexpr bool is_always_taken(BranchKind k) {
  return is_branch(k) && k != BranchKind::ConditionalDirect;
}

const char* to_string(BranchKind k);
std::optional<BranchKind> branch_kind_from_string(std::string_view name);

// Branch displacement in instruction words plus a direction bit.  A branch to
// its own pc is represented as magnitude 0, forward.
struct SignedOffset {
  std::uint64_t magnitude = 0;
  bool backward = false;

  friend bool operator==(const SignedOffset&, const SignedOffset&) = default;
};

constexpr SignedOffset compute_offset(addr_t pc, addr_t target) {
  assert(is_valid_iaddr(pc) && is_valid_iaddr(target));
  if (target >= pc) return {word_index(target - pc), false};
  return {word_index(pc - target), true};
}

// Smallest field width that can hold the magnitude: bits N with
// magnitude <= 2^N - 1.  Magnitude 0 needs 0 bits.
constexpr unsigned min_offset_bits(const SignedOffset& off) {
  return static_cast<unsigned>(std::bit_width(off.magnitude));
}

// Reapply a stored offset to a lookup pc.  Wraps modulo the address space so
// that aliased entries still reconstruct to some valid (if bogus) address.
constexpr addr_t apply_offset(addr_t pc, const SignedOffset& off) {
  const addr_t delta = off.magnitude << 2;
  const addr_t raw = off.backward ? pc - delta : pc + delta;
  return raw & (kVaLimit - 1) & ~addr_t{3};
}

}  // namespace fdipx
