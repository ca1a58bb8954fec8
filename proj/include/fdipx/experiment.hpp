/*
 * Experiment harness behind the command-line tool: configuration plumbing
 * with reproducible key=value echo, CSV emission for single runs and budget
 * sweeps, offset analysis, trace generation, and the storage tables with
 * their self-check.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdipx/sim.hpp"
#include "fdipx/trace_gen.hpp"

namespace fdipx {

inline constexpr const char* kToolVersion = "fdipx 1.0.0";

struct ExperimentConfig {
  SimConfig sim;
  std::string trace_path;
};

const char* to_string(TagMode m);
std::optional<TagMode> tag_mode_from_string(std::string_view name);

// Fully-resolved configuration as ordered key=value pairs; the keys double
// as config-file keys and long option names.
std::vector<std::pair<std::string, std::string>> config_kv(const ExperimentConfig& cfg);

// "# fdipx 1.0.0" followed by one "# key=value" line per parameter.
void echo_config(std::ostream& out, const ExperimentConfig& cfg);

// Budget strings: a baseline entry count ("8192", "8K") or "inf" for the
// unbounded full-tag table.  nullopt encodes inf; throws ConfigError.
std::optional<std::uint64_t> parse_budget(const std::string& text);

// Generator specs as flat key=value files.
GeneratorSpec load_generator_spec(const std::string& path);
std::vector<std::pair<std::string, std::string>> generator_spec_kv(const GeneratorSpec& spec);

// Single run: config echo + CSV (header, one row) to `csv`, aligned summary
// to `human`.  The trace is streamed, not loaded.
void run_simulate(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& human);

struct SweepOptions {
  std::vector<std::string> budgets;  // empty = the six table rows plus inf
  unsigned jobs = 1;                 // 0 = one worker per hardware thread
};

// Budget sweep over fdip-block and fdipx at each budget, same trace; rows
// in budget-major order regardless of worker count.
void run_sweep(const ExperimentConfig& cfg, const SweepOptions& opt, std::ostream& csv);

// Offset histogram CSV for a trace file.  threads as in analyze_offsets_parallel.
void run_analyze(const ExperimentConfig& cfg, int threads, std::ostream& csv);

// Deterministic synthetic trace written to `out_path`.
GenSummary run_gen_trace(const GeneratorSpec& spec, const std::string& out_path,
                         bool text = false);

// Storage geometry tables for the six baseline budgets.
void print_storage_tables(std::ostream& out);

// Every numeric cell recomputed against embedded expected values; returns
// one human-readable line per mismatch (empty = clean).
std::vector<std::string> storage_table_mismatches();

}  // namespace fdipx
