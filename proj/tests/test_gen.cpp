#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "fdipx/offset_hist.hpp"
#include "fdipx/trace_gen.hpp"

using namespace fdipx;

namespace {

int klass_of_bits(unsigned bits) {
  if (bits <= 8) return 0;
  if (bits <= 13) return 1;
  if (bits <= 23) return 2;
  return 3;
}

// Share of dynamic taken transfers per offset class, returns excluded (they
// retarget via the stack, not an encoded offset).
std::array<double, 5> class_shares(const std::vector<TraceRecord>& t) {
  const auto h = analyze_offsets(t);
  std::array<double, 5> counts{};
  for (std::size_t k = 0; k < kBranchKindCount; ++k) {
    if (static_cast<BranchKind>(k) == BranchKind::Return) continue;
    for (unsigned b = 0; b <= kMaxOffsetBits; ++b)
      counts[klass_of_bits(b)] += double(h.dynamic.bits[k][b]);
    counts[4] += double(h.dynamic.full_target[k]);
  }
  const double total = counts[0] + counts[1] + counts[2] + counts[3] + counts[4];
  REQUIRE(total > 0);
  for (auto& c : counts) c /= total;
  return counts;
}

}  // namespace

TEST_CASE("generation is a pure function of GeneratorSpec") {
  GeneratorSpec spec;
  spec.instruction_count = 30000;
  spec.static_branch_count = 120;
  spec.seed = 42;
  const auto a = generate_trace_records(spec);
  const auto b = generate_trace_records(spec);
  CHECK(a == b);
  CHECK(a.size() == 30000);

  spec.seed = 43;
  CHECK(generate_trace_records(spec) != a);
}

TEST_CASE("records are valid and sequentially consistent") {
  GeneratorSpec spec;
  spec.instruction_count = 200000;
  spec.static_branch_count = 300;
  spec.seed = 7;
  spec.call_depth_weights = {0.10, 0.05};
  const auto t = generate_trace_records(spec);
  REQUIRE(t.size() == 200000);

  for (std::size_t i = 0; i < t.size(); ++i) {
    CAPTURE(i);
    REQUIRE(validate_record(t[i]) == std::nullopt);
    if (i + 1 < t.size()) {
      const addr_t expect = t[i].taken ? t[i].target : t[i].pc + 4;
      REQUIRE(t[i + 1].pc == expect);
    }
    if (is_direct(t[i].kind)) REQUIRE(t[i].pc != t[i].target);
  }
}

TEST_CASE("call chains keep return addresses stack-consistent") {
  GeneratorSpec spec;
  spec.instruction_count = 150000;
  spec.static_branch_count = 260;
  spec.seed = 11;
  spec.call_depth_weights = {0.15, 0.10, 0.05};
  const auto t = generate_trace_records(spec);

  std::vector<addr_t> stack;
  std::uint64_t calls = 0, rets = 0;
  for (const auto& r : t) {
    if (is_call(r.kind)) {
      stack.push_back(r.pc + 4);
      ++calls;
    } else if (r.kind == BranchKind::Return) {
      REQUIRE(!stack.empty());
      REQUIRE(r.target == stack.back());
      stack.pop_back();
      ++rets;
    }
  }
  CHECK(calls > 0);
  CHECK(rets > 0);
}

TEST_CASE("static branch count is honored exactly") {
  GeneratorSpec spec;
  spec.instruction_count = 60000;
  spec.static_branch_count = 200;
  spec.seed = 3;
  spec.call_depth_weights = {0.2};
  std::vector<TraceRecord> t;
  const auto summary =
      generate_trace(spec, [&t](const TraceRecord& r) { t.push_back(r); });

  CHECK(summary.static_branches == 200);
  CHECK(summary.records == 60000);
  CHECK(summary.laps >= 1);

  std::set<addr_t> pcs;
  for (const auto& r : t)
    if (is_branch(r.kind)) pcs.insert(r.pc);
  CHECK(pcs.size() == 200);
}

TEST_CASE("offset mix is realized within two points") {
  GeneratorSpec spec;
  spec.instruction_count = 400000;
  spec.static_branch_count = 400;
  spec.seed = 17;
  spec.offset_mix = {0.50, 0.30, 0.15, 0.0, 0.05};

  SUBCASE("without calls") {}
  SUBCASE("with call chains") { spec.call_depth_weights = {0.10, 0.05}; }

  const auto shares = class_shares(generate_trace_records(spec));
  CHECK(std::abs(shares[0] - 0.50) < 0.02);
  CHECK(std::abs(shares[1] - 0.30) < 0.02);
  CHECK(std::abs(shares[2] - 0.15) < 0.02);
  CHECK(shares[3] == 0.0);
  CHECK(std::abs(shares[4] - 0.05) < 0.02);
}

TEST_CASE("wide offsets appear when requested") {
  GeneratorSpec spec;
  spec.instruction_count = 200000;
  spec.static_branch_count = 150;
  spec.seed = 5;
  spec.offset_mix = {0.40, 0.25, 0.15, 0.15, 0.05};
  spec.code_footprint_bytes = 256ull << 20;
  const auto shares = class_shares(generate_trace_records(spec));
  CHECK(std::abs(shares[3] - 0.15) < 0.02);
}

TEST_CASE("a near-only mix stays within eight bits") {
  GeneratorSpec spec;
  spec.instruction_count = 100000;
  spec.static_branch_count = 100;
  spec.seed = 23;
  spec.offset_mix = {1, 0, 0, 0, 0};
  spec.code_footprint_bytes = 1 << 20;
  const auto t = generate_trace_records(spec);
  REQUIRE(t.size() == 100000);

  const auto h = analyze_offsets(t);
  std::uint64_t wide = 0;
  for (std::size_t k = 0; k < kBranchKindCount; ++k) {
    for (unsigned b = 9; b <= kMaxOffsetBits; ++b) wide += h.dynamic.bits[k][b];
    wide += h.dynamic.full_target[k];
  }
  CHECK(wide == 0);
  CHECK(h.dynamic.total > 0);
}

TEST_CASE("infeasible specs are rejected") {
  GeneratorSpec spec;

  SUBCASE("too few static branches") {
    spec.static_branch_count = 4;
    CHECK_THROWS_AS(generate_trace_records(spec), ConfigError);
  }
  SUBCASE("footprint below the floor") {
    spec.code_footprint_bytes = 4096;
    CHECK_THROWS_AS(generate_trace_records(spec), ConfigError);
  }
  SUBCASE("wide offsets need a wide footprint") {
    spec.offset_mix = {0, 0, 0, 1, 0};
    spec.code_footprint_bytes = 1 << 20;
    CHECK_THROWS_AS(generate_trace_records(spec), ConfigError);
  }
  SUBCASE("zero mix") {
    spec.offset_mix = {0, 0, 0, 0, 0};
    CHECK_THROWS_AS(generate_trace_records(spec), ConfigError);
  }
  SUBCASE("negative mix weight") {
    spec.offset_mix = {0.5, -0.1, 0.3, 0.2, 0.1};
    CHECK_THROWS_AS(generate_trace_records(spec), ConfigError);
  }
  SUBCASE("call weights above one") {
    spec.call_depth_weights = {0.9, 0.6};
    CHECK_THROWS_AS(generate_trace_records(spec), ConfigError);
  }
  SUBCASE("footprint too small for the branch count") {
    spec.static_branch_count = 2000;
    spec.offset_mix = {1, 0, 0, 0, 0};
    spec.code_footprint_bytes = 64 * 1024;
    CHECK_THROWS_AS(generate_trace_records(spec), ConfigError);
  }
}

TEST_CASE("not-taken conditionals appear and carry encoded targets") {
  GeneratorSpec spec;
  spec.instruction_count = 120000;
  spec.static_branch_count = 150;
  spec.seed = 9;
  const auto t = generate_trace_records(spec);

  std::uint64_t nt = 0;
  for (const auto& r : t) {
    if (r.kind == BranchKind::ConditionalDirect && !r.taken) {
      ++nt;
      CHECK(r.target != 0);
      CHECK(r.target > r.pc);  // skips land forward over the filler
    }
  }
  CHECK(nt > 50);
}
