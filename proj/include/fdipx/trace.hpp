/*
 * Branch trace format.
 *
 * Binary: 8-byte header (magic "BTRC", little-endian u16 version = 1,
 * u16 reserved = 0) followed by 18-byte records: pc u64, target u64,
 * kind u8, taken u8.  Addresses carry 48 significant bits and must be
 * word aligned.  NotABranch records have taken = 0 and target = 0.
 *
 * Text: one record per line, `<hex pc> <hex target> <kind name> <T|N>`;
 * '#' starts a comment, blank lines are skipped.  The reader sniffs the
 * magic to pick the format.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdipx/types.hpp"

namespace fdipx {

struct TraceRecord {
  addr_t pc = 0;
  addr_t target = 0;
  BranchKind kind = BranchKind::NotABranch;
  bool taken = false;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline constexpr char kTraceMagic[4] = {'B', 'T', 'R', 'C'};
inline constexpr std::uint16_t kTraceVersion = 1;
inline constexpr std::size_t kTraceRecordBytes = 18;

struct TraceError : DataError {
  TraceError(const std::string& what, std::uint64_t byte_offset)
      : DataError(what), byte_offset(byte_offset) {}
  std::uint64_t byte_offset;
};

// Structural validity shared by reader, writer, and generator.
// Returns an error description, or nullopt if the record is well formed.
std::optional<std::string> validate_record(const TraceRecord& r);

class TraceReader {
 public:
  explicit TraceReader(std::istream& in);

  // Next record, or nullopt at end of input.  Throws TraceError on damage,
  // naming the byte offset (binary) or line (text).
  std::optional<TraceRecord> next();

  std::uint64_t records_read() const { return records_; }
  bool text() const { return text_; }

 private:
  std::optional<TraceRecord> next_binary();
  std::optional<TraceRecord> next_text();
  bool read_line(std::string& out);

  std::istream* in_;
  bool text_ = false;
  std::string carry_;       // bytes consumed while sniffing a text stream
  std::size_t carry_pos_ = 0;
  std::uint64_t offset_ = 0;  // bytes consumed (binary)
  std::uint64_t line_ = 0;    // lines consumed (text)
  std::uint64_t records_ = 0;
};

class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out, bool text = false);

  void write(const TraceRecord& r);  // throws TraceError on an invalid record
  std::uint64_t records_written() const { return records_; }

 private:
  std::ostream* out_;
  bool text_;
  std::uint64_t records_ = 0;
};

std::vector<TraceRecord> read_trace_file(const std::string& path);
void write_trace_file(const std::string& path, const std::vector<TraceRecord>& records,
                      bool text = false);

}  // namespace fdipx
