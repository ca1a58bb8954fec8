/*
 * Cycle-driven decoupled front-end simulator.
 *
 * Per cycle: completed fills install, the branch-prediction unit emits one
 * FTQ entry (unless the FTQ is full), the fetch engine consumes from the
 * head with demand L1-I accesses, and the prefetcher scans entries beyond
 * the head — so every demand access in a cycle precedes that cycle's
 * prefetch probes.  Committed instructions are checked against the trace;
 * any divergence flushes the FTQ, trains the BTB, and resteers.
 *
 * Timing covers fetch only: a cycle advances the front end, never a full
 * core, so reported numbers are front-end-bound proxies.
 */
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fdipx/btb_model.hpp"
#include "fdipx/trace.hpp"
#include "fdipx/types.hpp"

namespace fdipx {

enum class DirectionPolicy : std::uint8_t { Oracle, Bimodal };

const char* to_string(DirectionPolicy p);
std::optional<DirectionPolicy> direction_policy_from_string(std::string_view name);

struct SimConfig {
  BtbMode btb_mode = BtbMode::FdipxEnsemble;
  std::uint64_t baseline_entries = 8192;  // conventional-BTB budget the mode is sized from
  TagMode tag_mode = TagMode::Compressed16;
  bool btb_unbounded = false;

  bool prefetch = true;
  std::uint32_t ftq_capacity = 24;
  std::uint32_t fetch_width = 4;
  std::uint32_t lookup_bandwidth = 8;  // BTB probes per cycle, instruction-organized
  std::uint32_t prefetch_scan_rate = 2;  // FTQ entries scanned per cycle
  std::uint32_t miss_latency = 30;
  std::uint32_t resteer_penalty = 8;
  std::uint32_t l1i_sets = 64;
  std::uint32_t l1i_ways = 8;
  std::uint32_t ras_capacity = 32;
  DirectionPolicy direction = DirectionPolicy::Oracle;
  std::uint32_t bimodal_entries = 4096;

  void validate() const;  // throws ConfigError
};

struct SimStats {
  std::uint64_t instructions = 0;
  std::uint64_t cycles = 0;
  std::uint64_t l1i_accesses = 0;
  std::uint64_t l1i_misses = 0;
  std::uint64_t l1i_prefetch_hits = 0;
  std::uint64_t l1i_late_prefetch_hits = 0;
  std::uint64_t prefetches_issued = 0;
  std::uint64_t prefetches_filtered = 0;
  std::uint64_t prefetches_useful = 0;
  std::array<std::uint64_t, 4> btb_hits{};
  std::uint64_t btb_misses = 0;
  std::uint64_t resteers = 0;
  std::uint64_t multi_hits = 0;
  std::uint64_t demand_stall_cycles = 0;

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

// Pull-based record source; empty optional ends the trace.
using TraceSource = std::function<std::optional<TraceRecord>()>;

// Runs the front end over the trace with a model built from the config.
SimStats simulate(const TraceSource& source, const SimConfig& cfg);
SimStats simulate(std::span<const TraceRecord> trace, const SimConfig& cfg);

// Same, against a caller-owned model (e.g. pre-warmed); the model keeps its
// learned state afterwards.
SimStats simulate(const TraceSource& source, const SimConfig& cfg, BtbModel& btb);
SimStats simulate(std::span<const TraceRecord> trace, const SimConfig& cfg,
                  BtbModel& btb);

std::unique_ptr<BtbModel> make_btb_model(const SimConfig& cfg);

// Trains every taken branch of the trace into the model, using the same
// block-boundary rules as the simulator for block-organized models.
void prewarm_btb(BtbModel& btb, std::span<const TraceRecord> trace);

}  // namespace fdipx
