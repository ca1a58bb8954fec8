/*
 * Synthetic branch trace generator.
 *
 * Builds a ring of basic blocks whose terminating branches realize a
 * requested mix of offset widths, then walks the ring emitting records
 * until the instruction budget is spent.  Offset classes:
 *
 *   0: <= 8 bits    1: 9-13 bits    2: 14-23 bits    3: 24-46 bits
 *   4: indirect (full target)
 *
 * A third of the near-offset terminators are conditionals that fall
 * through every fourth lap, walking filler code to the next block, so
 * the trace exercises not-taken paths.  call_depth_weights[d-1] gives
 * the fraction of ring blocks that call a function chain of depth d;
 * each chain contributes 2d extra static branches (calls and returns)
 * whose return addresses are consistent with the walk.
 *
 * Output is fully determined by the GeneratorSpec (including across
 * thread counts and platforms); equal specs always yield equal records.
 */
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "fdipx/trace.hpp"

namespace fdipx {

struct GeneratorSpec {
  std::uint64_t seed = 1;
  std::uint64_t instruction_count = 1000000;
  std::uint32_t static_branch_count = 1000;
  // Relative weights per offset class; normalized internally.
  std::array<double, 5> offset_mix = {0.50, 0.30, 0.17, 0.02, 0.01};
  std::uint64_t code_footprint_bytes = 64ull << 20;
  std::vector<double> call_depth_weights = {};
};

struct GenSummary {
  std::uint64_t records = 0;
  std::uint32_t ring_blocks = 0;
  std::uint32_t chain_sites = 0;     // call/return sites added by call chains
  std::uint32_t static_branches = 0; // == static_branch_count
  std::uint64_t laps = 0;            // completed ring traversals
};

using TraceSink = std::function<void(const TraceRecord&)>;

GenSummary generate_trace(const GeneratorSpec& spec, const TraceSink& sink);
std::vector<TraceRecord> generate_trace_records(const GeneratorSpec& spec);

}  // namespace fdipx
