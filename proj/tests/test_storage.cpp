// Bit-exact storage accounting for the comparison tables.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fdipx/geometry.hpp"

using namespace fdipx;

TEST_CASE("conventional entry bits track the set count") {
  CHECK(bb_btb_entry_bits(128) == 92);
  CHECK(bb_btb_entry_bits(256) == 91);
  CHECK(bb_btb_entry_bits(512) == 90);
  CHECK(bb_btb_entry_bits(1024) == 89);
  CHECK(bb_btb_entry_bits(2048) == 88);
  CHECK(bb_btb_entry_bits(4096) == 87);
}

TEST_CASE("conventional BTB totals across the six budgets") {
  const std::uint64_t entries[] = {1024, 2048, 4096, 8192, 16384, 32768};
  const std::uint64_t bytes[] = {11776, 23296, 46080, 91136, 180224, 356352};
  const char* kb[] = {"11.5", "22.75", "45", "89", "176", "348"};
  for (int i = 0; i < 6; ++i) {
    const auto g = bb_btb_geometry(entries[i]);
    CHECK(g.sets == entries[i] / 8);
    CHECK(g.ways == 8);
    CHECK(g.entry_bits() == bb_btb_entry_bits(g.sets));
    const auto s = storage_bytes(g);
    CHECK(s.total_bytes == bytes[i]);
    CHECK(format_kb(s.total_bytes) == kb[i]);
  }
}

TEST_CASE("ensemble entry bits per offset class") {
  CHECK(fdipx_entry_bits(8) == 26);
  CHECK(fdipx_entry_bits(13) == 31);
  CHECK(fdipx_entry_bits(23) == 41);
  CHECK(fdipx_entry_bits(46) == 64);
}

TEST_CASE("ensemble sizing at the smallest budget") {
  const auto cfg = fdipx_sizing(1024);
  CHECK(cfg.partitions[0].sets == 128);
  CHECK(cfg.partitions[0].ways == 6);
  CHECK(cfg.partitions[1].sets == 128);
  CHECK(cfg.partitions[2].sets == 128);
  CHECK(cfg.partitions[3].sets == 16);
  CHECK(cfg.partitions[3].ways == 7);
  for (int p = 0; p < 4; ++p)
    CHECK(cfg.partitions[p].entry_bits() == fdipx_entry_bits(kPartitionOffsetBits[p]));

  const auto s = storage_bytes(cfg);
  REQUIRE(s.parts.size() == 4);
  CHECK(s.parts[0].entries == 768);
  CHECK(s.parts[1].entries == 768);
  CHECK(s.parts[2].entries == 768);
  CHECK(s.parts[3].entries == 112);
  CHECK(s.parts[0].bytes == 2496);
  CHECK(s.parts[1].bytes == 2976);
  CHECK(s.parts[2].bytes == 3936);
  CHECK(s.parts[3].bytes == 896);
  CHECK(s.total_bytes == 10304);
  CHECK(format_kb(s.total_bytes) == "10.06");
}

TEST_CASE("ensemble totals across the six budgets") {
  const std::uint64_t baselines[] = {1024, 2048, 4096, 8192, 16384, 32768};
  const std::uint64_t bytes[] = {10304, 20608, 41216, 82432, 164864, 329728};
  const char* kb[] = {"10.06", "20.12", "40.25", "80.5", "161", "322"};
  for (int i = 0; i < 6; ++i) {
    const auto s = storage_bytes(fdipx_sizing(baselines[i]));
    CHECK(s.total_bytes == bytes[i]);
    CHECK(format_kb(s.total_bytes) == kb[i]);
  }
}

TEST_CASE("per-partition KB rendering at the 45KB-class budget") {
  const auto s = storage_bytes(fdipx_sizing(4096));
  CHECK(format_kb(s.parts[0].bytes) == "9.75");
  CHECK(format_kb(s.parts[1].bytes) == "11.62");
  CHECK(format_kb(s.parts[2].bytes) == "15.38");
  CHECK(format_kb(s.parts[3].bytes) == "3.5");
}

TEST_CASE("entry-count ratio at the 8K baseline") {
  const auto cfg = fdipx_sizing(8192);
  CHECK(cfg.total_entries() == 19328);
  // 19328 / 8192 = 2.359375, i.e. 2.36 at two decimals.
  CHECK(cfg.total_entries() * 1000000ull / 8192 == 2359375);
}

TEST_CASE("KB formatting rounds half to even in exact arithmetic") {
  CHECK(format_kb(896) == "0.88");     // 0.875 -> up to the even digit
  CHECK(format_kb(20608) == "20.12");  // 20.125 -> stays on the even digit
  CHECK(format_kb(11904) == "11.62");  // 11.625
  CHECK(format_kb(15744) == "15.38");  // 15.375
  CHECK(format_kb(1024) == "1");
  CHECK(format_kb(1536) == "1.5");
}

TEST_CASE("monolithic instruction BTB drops the block-size field") {
  const auto g = monolithic_instr_geometry(1024, TagMode::Full);
  CHECK(g.entry_bits() == 39 + 46 + 2);
  const auto c = monolithic_instr_geometry(1024, TagMode::Compressed16);
  CHECK(c.entry_bits() == 16 + 46 + 2);
}

TEST_CASE("sizing rejects invalid baselines") {
  CHECK_THROWS_AS(fdipx_sizing(512), ConfigError);
  CHECK_THROWS_AS(fdipx_sizing(3000), ConfigError);
  CHECK_THROWS_AS(bb_btb_geometry(100), ConfigError);
}
