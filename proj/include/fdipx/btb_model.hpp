/*
 * Uniform front-end interface over the BTB organizations the simulator
 * compares: the conventional basic-block BTB (one query per block, 5-bit
 * length field), a monolithic instruction-granular table, and the
 * offset-partitioned ensemble.
 */
#pragma once

#include <memory>
#include <optional>

#include "fdipx/btb.hpp"
#include "fdipx/geometry.hpp"
#include "fdipx/types.hpp"

namespace fdipx {

enum class BtbMode : std::uint8_t { FdipBlock, MonolithicInstr, FdipxEnsemble };

const char* to_string(BtbMode m);
std::optional<BtbMode> btb_mode_from_string(std::string_view name);

struct BtbPrediction {
  BranchKind kind = BranchKind::NotABranch;
  addr_t target = 0;           // absolute; meaningless when target_from_ras
  bool target_from_ras = false;
  std::uint8_t block_len = 0;  // block-organized models only
  int partition = 0;
  bool multi_hit = false;
};

class BtbModel {
 public:
  virtual ~BtbModel() = default;

  // Block-organized models are probed once per basic block and predict a
  // region length; instruction-organized models are probed per address.
  virtual bool block_organized() const = 0;

  virtual std::optional<BtbPrediction> predict(addr_t pc) = 0;

  // pc is the branch address for instruction-organized models and the block
  // start for block-organized ones (block_len locating the branch inside).
  virtual void learn(addr_t pc, BranchKind kind, addr_t target,
                     std::uint8_t block_len) = 0;

  virtual void invalidate(addr_t pc) = 0;

  virtual StorageBreakdown storage() const = 0;
  virtual std::uint64_t occupancy() const = 0;
};

// Conventional FDIP basic-block BTB: full tags, 46-bit target, 5-bit length.
std::unique_ptr<BtbModel> make_block_btb_model(std::uint64_t baseline_entries,
                                               bool unbounded = false);

// Instruction-granular single table with a full 46-bit target field.
std::unique_ptr<BtbModel> make_monolithic_model(std::uint64_t baseline_entries,
                                                TagMode tag_mode = TagMode::Full,
                                                bool unbounded = false);

// Offset-partitioned four-table ensemble.
std::unique_ptr<BtbModel> make_ensemble_model(std::uint64_t baseline_entries,
                                              TagMode tag_mode = TagMode::Compressed16,
                                              bool unbounded = false);

}  // namespace fdipx
