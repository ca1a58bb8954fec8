/*
 * Behavioral BTB structures: a set-associative table with LRU replacement,
 * and the four-partition offset-specialized ensemble built from it.
 *
 * Storage accounting is analytical (geometry.hpp); these structures keep
 * full metadata regardless of the modeled field widths.  What the modeled
 * width does constrain is behavior: ensemble payloads are stored as sized
 * offsets, and compressed-tag geometries match on 16-bit folded tags, so
 * destructive aliasing is faithfully reproduced.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fdipx/geometry.hpp"
#include "fdipx/types.hpp"

namespace fdipx {

struct BtbEntry {
  bool valid = false;
  std::uint64_t tag = 0;
  BranchKind kind = BranchKind::NotABranch;
  bool backward = false;
  // Offset magnitude for direct branches under OffsetOrTarget, target word
  // index for indirect branches and TargetOnly geometries, 0 for returns.
  std::uint64_t payload = 0;
  std::uint8_t block_len = 0;
  std::uint64_t last_used = 0;
};

class SetAssocBtb {
 public:
  explicit SetAssocBtb(const BtbGeometry& geom);

  const BtbGeometry& geometry() const { return geom_; }

  // Tag match without a recency update.
  BtbEntry* find(addr_t pc);
  const BtbEntry* find(addr_t pc) const;

  void touch(BtbEntry& e) { e.last_used = ++tick_; }

  struct FillResult {
    bool updated = false;  // matched an existing tag, refreshed in place
    bool evicted = false;
    BtbEntry victim;
  };

  FillResult fill(addr_t pc, BranchKind kind, bool backward, std::uint64_t payload,
                  std::uint8_t block_len);

  bool invalidate(addr_t pc);

  std::uint64_t occupancy() const;

 private:
  std::vector<BtbEntry>& set_for(addr_t pc);

  BtbGeometry geom_;
  std::vector<std::vector<BtbEntry>> sets_;
  std::uint64_t tick_ = 0;
};

struct LookupResult {
  BranchKind kind = BranchKind::NotABranch;
  addr_t target = 0;          // absolute, meaningless when target_from_ras
  bool target_from_ras = false;
  std::uint8_t block_len = 0;
  int partition = 0;
  bool multi_hit = false;
};

struct InsertResult {
  int partition = 0;
  bool updated = false;
  bool evicted = false;
  BtbEntry victim;
};

class EnsembleBtb {
 public:
  explicit EnsembleBtb(const EnsembleConfig& cfg);

  const EnsembleConfig& config() const { return cfg_; }

  // Probes all four partitions in parallel; on multiple hits the lowest
  // partition index wins and the result carries multi_hit.
  std::optional<LookupResult> lookup(addr_t pc);

  // Allocates into select_partition's choice, updating in place on a tag
  // match.  A matching tag in any other partition is dropped: under correct
  // operation a branch lives in exactly one partition, so a cross-partition
  // match can only be an alias or a stale casualty of one.
  InsertResult insert(addr_t pc, BranchKind kind, addr_t target);

  void invalidate(addr_t pc);

  std::uint64_t occupancy() const;

 private:
  EnsembleConfig cfg_;
  std::vector<SetAssocBtb> parts_;
};

// Unbounded-ways full-tag ensemble shape, for equivalence checks against an
// associative map and for unbounded-budget runs.
EnsembleConfig unbounded_ensemble(TagMode tag_mode = TagMode::Full);

}  // namespace fdipx
