#include "fdipx/offset_hist.hpp"

#include <cstdio>
#include <ostream>
#include <unordered_map>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fdipx {

namespace {

// First sighting of a static branch; the lowest trace ordinal wins a merge.
struct StaticSeen {
  std::uint64_t ord;
  BranchKind kind;
  addr_t target;
};

using StaticMap = std::unordered_map<addr_t, StaticSeen>;

void bin_one(OffsetTable& t, BranchKind kind, addr_t pc, addr_t target) {
  const auto k = static_cast<std::size_t>(kind);
  if (is_indirect(kind)) {
    ++t.full_target[k];
  } else {
    ++t.bits[k][min_offset_bits(compute_offset(pc, target))];
  }
  ++t.total;
}

void scan_shard(std::span<const TraceRecord> trace, std::uint64_t base, OffsetTable& dyn,
                StaticMap& seen) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    if (!is_branch(r.kind)) continue;
    if (r.taken) bin_one(dyn, r.kind, r.pc, r.target);
    seen.try_emplace(r.pc, StaticSeen{base + i, r.kind, r.target});
  }
}

OffsetTable finish_static(const StaticMap& seen) {
  OffsetTable t;
  for (const auto& [pc, s] : seen) bin_one(t, s.kind, pc, s.target);
  return t;
}

}  // namespace

OffsetHistogram analyze_offsets(std::span<const TraceRecord> trace) {
  OffsetHistogram h;
  StaticMap seen;
  scan_shard(trace, 0, h.dynamic, seen);
  h.static_ = finish_static(seen);
  return h;
}

OffsetHistogram analyze_offsets_parallel(std::span<const TraceRecord> trace, int threads) {
#ifndef _OPENMP
  (void)threads;
  return analyze_offsets(trace);
#else
  const int n = threads > 0 ? threads : omp_get_max_threads();
  if (n <= 1 || trace.size() < 2) return analyze_offsets(trace);

  std::vector<OffsetTable> dyn(n);
  std::vector<StaticMap> seen(n);
#pragma omp parallel num_threads(n)
  {
    const int t = omp_get_thread_num();
    const std::size_t lo = trace.size() * t / n;
    const std::size_t hi = trace.size() * (t + 1) / n;
    scan_shard(trace.subspan(lo, hi - lo), lo, dyn[t], seen[t]);
  }

  OffsetHistogram h;
  StaticMap merged = std::move(seen[0]);
  h.dynamic = dyn[0];
  for (int t = 1; t < n; ++t) {
    for (std::size_t k = 0; k < kBranchKindCount; ++k) {
      h.dynamic.full_target[k] += dyn[t].full_target[k];
      for (unsigned b = 0; b <= kMaxOffsetBits; ++b) h.dynamic.bits[k][b] += dyn[t].bits[k][b];
    }
    h.dynamic.total += dyn[t].total;
    for (const auto& [pc, s] : seen[t]) {
      auto [it, inserted] = merged.try_emplace(pc, s);
      if (!inserted && s.ord < it->second.ord) it->second = s;
    }
  }
  h.static_ = finish_static(merged);
  return h;
#endif
}

void write_histogram_csv(std::ostream& out, const OffsetHistogram& hist) {
  out << "bits,kind,mode,count,frequency\n";
  char buf[128];
  const auto emit = [&](const OffsetTable& t, const char* mode) {
    if (t.total == 0) return;
    for (std::size_t k = 0; k < kBranchKindCount; ++k) {
      const char* kind = to_string(static_cast<BranchKind>(k));
      for (unsigned b = 0; b <= kMaxOffsetBits; ++b) {
        if (t.bits[k][b] == 0) continue;
        std::snprintf(buf, sizeof buf, "%u,%s,%s,%llu,%.6f\n", b, kind, mode,
                      static_cast<unsigned long long>(t.bits[k][b]),
                      static_cast<double>(t.bits[k][b]) / static_cast<double>(t.total));
        out << buf;
      }
    }
    for (std::size_t k = 0; k < kBranchKindCount; ++k) {
      if (t.full_target[k] == 0) continue;
      std::snprintf(buf, sizeof buf, "full,%s,%s,%llu,%.6f\n",
                    to_string(static_cast<BranchKind>(k)), mode,
                    static_cast<unsigned long long>(t.full_target[k]),
                    static_cast<double>(t.full_target[k]) / static_cast<double>(t.total));
      out << buf;
    }
  };
  emit(hist.dynamic, "dynamic");
  emit(hist.static_, "static");
}

}  // namespace fdipx
