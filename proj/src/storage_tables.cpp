#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "fdipx/experiment.hpp"
#include "fdipx/geometry.hpp"

namespace fdipx {

namespace {

// Expected table contents, worked out independently of the geometry code:
// entry costs from the field layouts, KB strings from exact byte counts
// rounded half-even at two decimals.

struct T1Row {
  std::uint32_t baseline, sets, ways;
  unsigned bits;
  const char* kb;
};

constexpr T1Row kTable1[] = {
    {1024, 128, 8, 92, "11.5"},  {2048, 256, 8, 91, "22.75"},
    {4096, 512, 8, 90, "45"},    {8192, 1024, 8, 89, "89"},
    {16384, 2048, 8, 88, "176"}, {32768, 4096, 8, 87, "348"},
};

struct T2Part {
  std::uint32_t sets, ways;
  std::uint64_t entries;
  unsigned bits;
  const char* kb;
};

struct T2Row {
  std::uint32_t baseline;
  T2Part part[4];
  std::uint64_t total_entries;
  const char* total_kb;
  const char* ratio;
};

constexpr T2Row kTable2[] = {
    {1024,
     {{128, 6, 768, 26, "2.44"},
      {128, 6, 768, 31, "2.91"},
      {128, 6, 768, 41, "3.84"},
      {16, 7, 112, 64, "0.88"}},
     2416,
     "10.06",
     "2.36"},
    {2048,
     {{256, 6, 1536, 26, "4.88"},
      {256, 6, 1536, 31, "5.81"},
      {256, 6, 1536, 41, "7.69"},
      {32, 7, 224, 64, "1.75"}},
     4832,
     "20.12",
     "2.36"},
    {4096,
     {{512, 6, 3072, 26, "9.75"},
      {512, 6, 3072, 31, "11.62"},
      {512, 6, 3072, 41, "15.38"},
      {64, 7, 448, 64, "3.5"}},
     9664,
     "40.25",
     "2.36"},
    {8192,
     {{1024, 6, 6144, 26, "19.5"},
      {1024, 6, 6144, 31, "23.25"},
      {1024, 6, 6144, 41, "30.75"},
      {128, 7, 896, 64, "7"}},
     19328,
     "80.5",
     "2.36"},
    {16384,
     {{2048, 6, 12288, 26, "39"},
      {2048, 6, 12288, 31, "46.5"},
      {2048, 6, 12288, 41, "61.5"},
      {256, 7, 1792, 64, "14"}},
     38656,
     "161",
     "2.36"},
    {32768,
     {{4096, 6, 24576, 26, "78"},
      {4096, 6, 24576, 31, "93"},
      {4096, 6, 24576, 41, "123"},
      {512, 7, 3584, 64, "28"}},
     77312,
     "322",
     "2.36"},
};

std::string ratio_2dp(std::uint64_t total, std::uint64_t baseline) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f",
                static_cast<double>(total) / static_cast<double>(baseline));
  return buf;
}

}  // namespace

void print_storage_tables(std::ostream& out) {
  char buf[160];
  out << "conventional basic-block btb (full tag, 5-bit size field)\n";
  out << "  baseline    sets  ways  entry bits  storage\n";
  for (const T1Row& row : kTable1) {
    const BtbGeometry g = bb_btb_geometry(row.baseline);
    const StorageBreakdown sb = storage_bytes(g);
    std::snprintf(buf, sizeof buf, "  %8u  %6u  %4u  %10u  %s KB\n", row.baseline,
                  g.sets, g.ways, g.entry_bits(), format_kb(sb.total_bytes).c_str());
    out << buf;
  }
  out << "\noffset-partitioned btb (16-bit tags, 8/13/23/46-bit offsets)\n";
  for (const T2Row& row : kTable2) {
    const EnsembleConfig ec = fdipx_sizing(row.baseline);
    const StorageBreakdown sb = storage_bytes(ec);
    std::snprintf(buf, sizeof buf,
                  "  baseline %u: %llu entries (%sx), %s KB\n", row.baseline,
                  static_cast<unsigned long long>(ec.total_entries()),
                  ratio_2dp(ec.total_entries(), row.baseline).c_str(),
                  format_kb(sb.total_bytes).c_str());
    out << buf;
    out << "    partition  offset bits    sets  ways  entries  entry bits  storage\n";
    for (int p = 0; p < 4; ++p) {
      const BtbGeometry& g = ec.partitions[p];
      std::snprintf(buf, sizeof buf,
                    "           p%d  %11u  %6u  %4u  %7llu  %10u  %s KB\n", p,
                    g.offset_field_bits, g.sets, g.ways,
                    static_cast<unsigned long long>(sb.parts[p].entries),
                    sb.parts[p].entry_bits, format_kb(sb.parts[p].bytes).c_str());
      out << buf;
    }
  }
}

std::vector<std::string> storage_table_mismatches() {
  std::vector<std::string> bad;
  auto expect_u = [&bad](const std::string& cell, std::uint64_t got,
                         std::uint64_t want) {
    if (got != want)
      bad.push_back(cell + ": computed " + std::to_string(got) + ", expected " +
                    std::to_string(want));
  };
  auto expect_s = [&bad](const std::string& cell, const std::string& got,
                         const std::string& want) {
    if (got != want) bad.push_back(cell + ": computed " + got + ", expected " + want);
  };

  for (const T1Row& row : kTable1) {
    const std::string tag = "table1[" + std::to_string(row.baseline) + "]";
    const BtbGeometry g = bb_btb_geometry(row.baseline);
    const StorageBreakdown sb = storage_bytes(g);
    expect_u(tag + ".sets", g.sets, row.sets);
    expect_u(tag + ".ways", g.ways, row.ways);
    expect_u(tag + ".entry_bits", g.entry_bits(), row.bits);
    expect_u(tag + ".entry_bits_formula", bb_btb_entry_bits(g.sets), row.bits);
    expect_s(tag + ".kb", format_kb(sb.total_bytes), row.kb);
  }
  for (const T2Row& row : kTable2) {
    const std::string tag = "table2[" + std::to_string(row.baseline) + "]";
    const EnsembleConfig ec = fdipx_sizing(row.baseline);
    const StorageBreakdown sb = storage_bytes(ec);
    for (int p = 0; p < 4; ++p) {
      const std::string ptag = tag + ".p" + std::to_string(p);
      const BtbGeometry& g = ec.partitions[p];
      expect_u(ptag + ".sets", g.sets, row.part[p].sets);
      expect_u(ptag + ".ways", g.ways, row.part[p].ways);
      expect_u(ptag + ".entries", sb.parts[p].entries, row.part[p].entries);
      expect_u(ptag + ".entry_bits", sb.parts[p].entry_bits, row.part[p].bits);
      expect_u(ptag + ".entry_bits_formula",
               fdipx_entry_bits(g.offset_field_bits), row.part[p].bits);
      expect_s(ptag + ".kb", format_kb(sb.parts[p].bytes), row.part[p].kb);
    }
    expect_u(tag + ".total_entries", ec.total_entries(), row.total_entries);
    expect_s(tag + ".total_kb", format_kb(sb.total_bytes), row.total_kb);
    expect_s(tag + ".ratio", ratio_2dp(ec.total_entries(), row.baseline), row.ratio);
  }
  return bad;
}

}  // namespace fdipx
