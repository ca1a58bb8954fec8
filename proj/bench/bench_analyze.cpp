#include <benchmark/benchmark.h>

#include <vector>

#include "fdipx/offset_hist.hpp"
#include "fdipx/trace_gen.hpp"

using namespace fdipx;

namespace {

const std::vector<TraceRecord>& bench_trace() {
  static const std::vector<TraceRecord> trace = [] {
    GeneratorSpec spec;
    spec.seed = 9001;
    spec.instruction_count = 4000000;
    spec.static_branch_count = 4000;
    return generate_trace_records(spec);
  }();
  return trace;
}

void BM_AnalyzeSerial(benchmark::State& state) {
  const auto& trace = bench_trace();
  for (auto _ : state) {
    OffsetHistogram h = analyze_offsets(trace);
    benchmark::DoNotOptimize(h);
  }
  state.SetItemsProcessed(state.iterations() * trace.size());
}

void BM_AnalyzeParallel(benchmark::State& state) {
  const auto& trace = bench_trace();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    OffsetHistogram h = analyze_offsets_parallel(trace, threads);
    benchmark::DoNotOptimize(h);
  }
  state.SetItemsProcessed(state.iterations() * trace.size());
}

}  // namespace

BENCHMARK(BM_AnalyzeSerial);
BENCHMARK(BM_AnalyzeParallel)->Arg(2)->Arg(4)->Arg(0);

BENCHMARK_MAIN();
