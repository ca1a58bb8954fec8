/*
 * BTB geometry and storage accounting.
 *
 * A geometry describes one set-associative structure: set/way shape, tag
 * mode (full-width or compressed to 16 bits), payload (a sized offset field
 * or a full 46-bit target), and an optional block-size field.  Entry cost in
 * bits is tag + payload + block-size + 2 kind bits.
 *
 * The offset-partitioned ensemble runs four such structures with offset
 * fields of 8 / 13 / 23 / 46 bits.  Sizing for a baseline budget of B
 * conventional entries: partitions 0-2 get (3/4)B entries each as B/8 sets
 * x 6 ways; partition 3 gets (7/64)B entries as B/64 sets x 7 ways.
 */
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fdipx/tag.hpp"
#include "fdipx/types.hpp"

namespace fdipx {

enum class TagMode : std::uint8_t { Full, Compressed16 };
enum class PayloadMode : std::uint8_t { OffsetOrTarget, TargetOnly };

inline constexpr unsigned kKindBits = 2;
inline constexpr unsigned kBlockSizeBits = 5;
inline constexpr unsigned kMaxBlockLen = 31;
inline constexpr std::array<std::uint8_t, 4> kPartitionOffsetBits = {8, 13, 23, 46};

struct IndexTag {
  std::uint32_t set = 0;
  std::uint64_t tag = 0;
  unsigned full_tag_bits = 0;
};

struct BtbGeometry {
  std::uint32_t sets = 1;
  std::uint32_t ways = 1;  // 0 means unbounded (no eviction); storage undefined
  std::uint8_t offset_field_bits = 0;  // meaningful with PayloadMode::OffsetOrTarget
  TagMode tag_mode = TagMode::Full;
  PayloadMode payload_mode = PayloadMode::TargetOnly;
  std::uint8_t block_size_field_bits = 0;

  unsigned index_bits() const;
  unsigned full_tag_bits() const { return kWordIndexBits - index_bits(); }
  unsigned tag_bits() const {
    return tag_mode == TagMode::Compressed16 ? 16 : full_tag_bits();
  }
  unsigned payload_bits() const {
    return payload_mode == PayloadMode::TargetOnly ? kWordIndexBits : offset_field_bits;
  }
  unsigned entry_bits() const {
    return tag_bits() + payload_bits() + block_size_field_bits + kKindBits;
  }
  std::uint64_t entries() const { return std::uint64_t{sets} * ways; }

  // Splits a pc into set index and (possibly compressed) tag.
  IndexTag index_and_tag(addr_t pc) const;

  void validate() const;  // throws ConfigError
};

struct EnsembleConfig {
  std::array<BtbGeometry, 4> partitions;
  std::uint64_t baseline_entries = 0;

  std::uint64_t total_entries() const;
};

// Conventional basic-block BTB entry cost for a set count (full tag + 46-bit
// target + 5-bit block size + 2 kind bits).
unsigned bb_btb_entry_bits(std::uint64_t sets);

// Ensemble entry cost for one offset field width (16-bit tag + offset + kind).
unsigned fdipx_entry_bits(unsigned offset_field_bits);

// Conventional basic-block BTB as sized in the comparison tables:
// baseline_entries = sets x 8 ways.
BtbGeometry bb_btb_geometry(std::uint64_t baseline_entries);

// Instruction-granular monolithic BTB of the same shape, minus the
// block-size field.
BtbGeometry monolithic_instr_geometry(std::uint64_t baseline_entries, TagMode tag_mode);

// Offset-partitioned ensemble sized for a baseline budget.  baseline_entries
// must be a power of two >= 1024.
EnsembleConfig fdipx_sizing(std::uint64_t baseline_entries,
                            TagMode tag_mode = TagMode::Compressed16);

// Which partition a branch allocates into: returns go to partition 0 (target
// always comes from the return-address stack), indirect branches to partition
// 3 (full target), direct branches to the narrowest offset field that fits.
int select_partition(BranchKind kind, const SignedOffset& off);

struct PartitionStorage {
  std::uint64_t entries = 0;
  unsigned entry_bits = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t bytes = 0;
};

struct StorageBreakdown {
  std::vector<PartitionStorage> parts;
  std::uint64_t total_bits = 0;
  std::uint64_t total_bytes = 0;
};

StorageBreakdown storage_bytes(const BtbGeometry& geom);
StorageBreakdown storage_bytes(const EnsembleConfig& cfg);

// KB rendered at two decimals (1 KB = 1024 bytes), round-half-even computed
// in exact integer arithmetic, trailing zeros trimmed: 11776 -> "11.5",
// 896 -> "0.88", 164864 -> "161".
std::string format_kb(std::uint64_t bytes);

}  // namespace fdipx
