/*
 * Branch offset distribution analysis.
 *
 * Dynamic mode counts every taken branch occurrence; static mode counts
 * each distinct branch pc once, using its first resolvable occurrence
 * (taken, or carrying an encoded target).  Direct branches and returns
 * bin by the minimum signed-magnitude offset width in instruction words;
 * indirect branches count under a per-kind full-target bucket.
 *
 * The parallel analyzer shards the trace across OpenMP threads and merges
 * with first-occurrence precedence, so its output is identical to the
 * serial reference for any thread count.
 */
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>

#include "fdipx/trace.hpp"
#include "fdipx/types.hpp"

namespace fdipx {

inline constexpr unsigned kMaxOffsetBits = 46;

struct OffsetTable {
  // [kind][offset bits 0..46]
  std::array<std::array<std::uint64_t, kMaxOffsetBits + 1>, kBranchKindCount> bits{};
  // [kind]: occurrences binned as full targets (indirect kinds)
  std::array<std::uint64_t, kBranchKindCount> full_target{};
  std::uint64_t total = 0;

  friend bool operator==(const OffsetTable&, const OffsetTable&) = default;
};

struct OffsetHistogram {
  OffsetTable dynamic;
  OffsetTable static_;

  friend bool operator==(const OffsetHistogram&, const OffsetHistogram&) = default;
};

OffsetHistogram analyze_offsets(std::span<const TraceRecord> trace);

// threads = 0 uses the OpenMP default.  Bit-identical to analyze_offsets.
OffsetHistogram analyze_offsets_parallel(std::span<const TraceRecord> trace, int threads = 0);

// CSV: bits,kind,mode,count,frequency — nonzero rows only, full-target rows
// use bits=full, frequency is count/mode-total with six decimals.
void write_histogram_csv(std::ostream& out, const OffsetHistogram& hist);

}  // namespace fdipx
