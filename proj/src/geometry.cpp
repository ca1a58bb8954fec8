#include "fdipx/geometry.hpp"

#include <bit>
#include <cstdio>

namespace fdipx {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && std::has_single_bit(v); }

}  // namespace

unsigned BtbGeometry::index_bits() const {
  assert(is_pow2(sets));
  return static_cast<unsigned>(std::bit_width(std::uint64_t{sets}) - 1);
}

IndexTag BtbGeometry::index_and_tag(addr_t pc) const {
  assert(is_valid_iaddr(pc));
  const addr_t wi = word_index(pc);
  IndexTag out;
  out.set = static_cast<std::uint32_t>(wi & (sets - 1));
  out.full_tag_bits = full_tag_bits();
  const std::uint64_t full = wi >> index_bits();
  out.tag = tag_mode == TagMode::Compressed16 ? compress_tag(full, out.full_tag_bits) : full;
  return out;
}

void BtbGeometry::validate() const {
  if (!is_pow2(sets)) throw ConfigError("btb sets must be a power of two");
  if (tag_mode == TagMode::Compressed16 && full_tag_bits() < 16)
    throw ConfigError("compressed tags need a full tag of at least 16 bits");
  if (payload_mode == PayloadMode::OffsetOrTarget &&
      (offset_field_bits == 0 || offset_field_bits > kWordIndexBits))
    throw ConfigError("offset field width out of range");
}

std::uint64_t EnsembleConfig::total_entries() const {
  std::uint64_t n = 0;
  for (const auto& g : partitions) n += g.entries();
  return n;
}

unsigned bb_btb_entry_bits(std::uint64_t sets) {
  if (!is_pow2(sets)) throw ConfigError("bb btb sets must be a power of two");
  const unsigned index = static_cast<unsigned>(std::bit_width(sets) - 1);
  if (index >= kWordIndexBits) throw ConfigError("bb btb set count too large");
  return (kWordIndexBits - index) + kWordIndexBits + kBlockSizeBits + kKindBits;
}

unsigned fdipx_entry_bits(unsigned offset_field_bits) {
  return 16 + offset_field_bits + kKindBits;
}

BtbGeometry bb_btb_geometry(std::uint64_t baseline_entries) {
  if (!is_pow2(baseline_entries) || baseline_entries < 8)
    throw ConfigError("baseline entry count must be a power of two >= 8");
  BtbGeometry g;
  g.sets = static_cast<std::uint32_t>(baseline_entries / 8);
  g.ways = 8;
  g.tag_mode = TagMode::Full;
  g.payload_mode = PayloadMode::TargetOnly;
  g.block_size_field_bits = kBlockSizeBits;
  g.validate();
  return g;
}

BtbGeometry monolithic_instr_geometry(std::uint64_t baseline_entries, TagMode tag_mode) {
  BtbGeometry g = bb_btb_geometry(baseline_entries);
  g.block_size_field_bits = 0;
  g.tag_mode = tag_mode;
  g.validate();
  return g;
}

EnsembleConfig fdipx_sizing(std::uint64_t baseline_entries, TagMode tag_mode) {
  if (!is_pow2(baseline_entries) || baseline_entries < 1024)
    throw ConfigError("ensemble baseline must be a power of two >= 1024");
  EnsembleConfig cfg;
  cfg.baseline_entries = baseline_entries;
  for (int p = 0; p < 4; ++p) {
    BtbGeometry g;
    if (p < 3) {
      g.sets = static_cast<std::uint32_t>(baseline_entries / 8);
      g.ways = 6;
    } else {
      g.sets = static_cast<std::uint32_t>(baseline_entries / 64);
      g.ways = 7;
    }
    g.offset_field_bits = kPartitionOffsetBits[p];
    g.tag_mode = tag_mode;
    g.payload_mode = PayloadMode::OffsetOrTarget;
    g.validate();
    cfg.partitions[p] = g;
  }
  return cfg;
}

int select_partition(BranchKind kind, const SignedOffset& off) {
  assert(is_branch(kind));
  if (kind == BranchKind::Return) return 0;
  if (is_indirect(kind)) return 3;
  const unsigned need = min_offset_bits(off);
  for (int p = 0; p < 4; ++p)
    if (need <= kPartitionOffsetBits[p]) return p;
  assert(false && "direct offset exceeds 46 bits in a 48-bit aligned space");
  return 3;
}

StorageBreakdown storage_bytes(const BtbGeometry& geom) {
  assert(geom.ways != 0 && "unbounded structures have no storage footprint");
  StorageBreakdown out;
  PartitionStorage p;
  p.entries = geom.entries();
  p.entry_bits = geom.entry_bits();
  p.total_bits = p.entries * p.entry_bits;
  p.bytes = p.total_bits / 8;
  out.parts.push_back(p);
  out.total_bits = p.total_bits;
  out.total_bytes = out.total_bits / 8;
  return out;
}

StorageBreakdown storage_bytes(const EnsembleConfig& cfg) {
  StorageBreakdown out;
  for (const auto& g : cfg.partitions) {
    PartitionStorage p;
    p.entries = g.entries();
    p.entry_bits = g.entry_bits();
    p.total_bits = p.entries * p.entry_bits;
    p.bytes = p.total_bits / 8;
    out.parts.push_back(p);
    out.total_bits += p.total_bits;
  }
  out.total_bytes = out.total_bits / 8;
  return out;
}

std::string format_kb(std::uint64_t bytes) {
  // Round-half-even on hundredths of a KB, done in integers so the result
  // does not depend on the FP environment.
  const std::uint64_t scaled = bytes * 100;
  std::uint64_t q = scaled / 1024;
  const std::uint64_t rem = scaled % 1024;
  if (rem > 512 || (rem == 512 && (q & 1))) ++q;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu.%02llu",
                static_cast<unsigned long long>(q / 100),
                static_cast<unsigned long long>(q % 100));
  std::string s{buf};
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace fdipx
