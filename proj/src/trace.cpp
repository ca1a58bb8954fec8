#include "fdipx/trace.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fdipx {

std::optional<std::string> validate_record(const TraceRecord& r) {
  if (!is_valid_iaddr(r.pc)) return "pc not a word-aligned 48-bit address";
  if (r.kind == BranchKind::NotABranch) {
    if (r.taken) return "NotABranch record marked taken";
    if (r.target != 0) return "NotABranch record carries a target";
    return std::nullopt;
  }
  if (!is_valid_iaddr(r.target)) return "target not a word-aligned 48-bit address";
  if (is_always_taken(r.kind) && !r.taken)
    return std::string(to_string(r.kind)) + " record marked not taken";
  return std::nullopt;
}

namespace {

std::uint64_t load_le64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint16_t load_le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void store_le64(unsigned char* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

}  // namespace

TraceReader::TraceReader(std::istream& in) : in_(&in) {
  char hdr[4] = {};
  in.read(hdr, 4);
  const std::streamsize got = in.gcount();
  if (got == 4 && std::memcmp(hdr, kTraceMagic, 4) == 0) {
    unsigned char rest[4] = {};
    in.read(reinterpret_cast<char*>(rest), 4);
    if (in.gcount() != 4) throw TraceError("truncated trace header", 4);
    const std::uint16_t version = load_le16(rest);
    const std::uint16_t reserved = load_le16(rest + 2);
    if (version != kTraceVersion)
      throw TraceError("unsupported trace version " + std::to_string(version), 4);
    if (reserved != 0) throw TraceError("nonzero reserved header field", 6);
    offset_ = 8;
    return;
  }
  // Not a binary trace: treat as text, replaying the sniffed bytes.
  text_ = true;
  carry_.assign(hdr, static_cast<std::size_t>(got));
  in.clear();
}

std::optional<TraceRecord> TraceReader::next() {
  return text_ ? next_text() : next_binary();
}

std::optional<TraceRecord> TraceReader::next_binary() {
  unsigned char buf[kTraceRecordBytes];
  in_->read(reinterpret_cast<char*>(buf), kTraceRecordBytes);
  const std::streamsize got = in_->gcount();
  if (got == 0) return std::nullopt;
  if (got != static_cast<std::streamsize>(kTraceRecordBytes))
    throw TraceError("truncated record at byte offset " + std::to_string(offset_), offset_);

  TraceRecord r;
  r.pc = load_le64(buf);
  r.target = load_le64(buf + 8);
  const unsigned kind = buf[16];
  const unsigned taken = buf[17];
  if (kind >= kBranchKindCount)
    throw TraceError("bad kind byte " + std::to_string(kind) + " at byte offset " +
                         std::to_string(offset_ + 16),
                     offset_ + 16);
  if (taken > 1)
    throw TraceError("bad taken byte " + std::to_string(taken) + " at byte offset " +
                         std::to_string(offset_ + 17),
                     offset_ + 17);
  r.kind = static_cast<BranchKind>(kind);
  r.taken = taken != 0;
  if (auto err = validate_record(r))
    throw TraceError(*err + " at byte offset " + std::to_string(offset_), offset_);
  offset_ += kTraceRecordBytes;
  ++records_;
  return r;
}

bool TraceReader::read_line(std::string& out) {
  out.clear();
  bool any = false;
  while (carry_pos_ < carry_.size()) {
    any = true;
    const char c = carry_[carry_pos_++];
    if (c == '\n') return true;
    out.push_back(c);
  }
  for (int ch = in_->get(); ch != std::char_traits<char>::eof(); ch = in_->get()) {
    any = true;
    if (ch == '\n') return true;
    out.push_back(static_cast<char>(ch));
  }
  return any;
}

std::optional<TraceRecord> TraceReader::next_text() {
  std::string linebuf;
  while (read_line(linebuf)) {
    ++line_;
    const std::size_t hash = linebuf.find('#');
    if (hash != std::string::npos) linebuf.erase(hash);
    std::istringstream fields(linebuf);
    std::string pc_tok, tgt_tok, kind_tok, taken_tok, extra;
    if (!(fields >> pc_tok)) continue;  // blank or comment-only line
    const std::string where = " on line " + std::to_string(line_);
    if (!(fields >> tgt_tok >> kind_tok >> taken_tok))
      throw TraceError("short record" + where, line_);
    if (fields >> extra) throw TraceError("trailing fields" + where, line_);

    TraceRecord r;
    try {
      std::size_t used = 0;
      r.pc = std::stoull(pc_tok, &used, 16);
      if (used != pc_tok.size()) throw std::invalid_argument(pc_tok);
      r.target = std::stoull(tgt_tok, &used, 16);
      if (used != tgt_tok.size()) throw std::invalid_argument(tgt_tok);
    } catch (const std::logic_error&) {
      throw TraceError("bad address field" + where, line_);
    }
    const auto kind = branch_kind_from_string(kind_tok);
    if (!kind) throw TraceError("unknown kind '" + kind_tok + "'" + where, line_);
    r.kind = *kind;
    if (taken_tok == "T")
      r.taken = true;
    else if (taken_tok == "N")
      r.taken = false;
    else
      throw TraceError("bad taken flag '" + taken_tok + "'" + where, line_);
    if (auto err = validate_record(r)) throw TraceError(*err + where, line_);
    ++records_;
    return r;
  }
  return std::nullopt;
}

TraceWriter::TraceWriter(std::ostream& out, bool text) : out_(&out), text_(text) {
  if (!text_) {
    unsigned char hdr[8] = {};
    std::memcpy(hdr, kTraceMagic, 4);
    hdr[4] = static_cast<unsigned char>(kTraceVersion & 0xff);
    hdr[5] = static_cast<unsigned char>(kTraceVersion >> 8);
    out_->write(reinterpret_cast<const char*>(hdr), 8);
  }
}

void TraceWriter::write(const TraceRecord& r) {
  if (auto err = validate_record(r))
    throw TraceError(*err + " in record " + std::to_string(records_), records_);
  if (text_) {
    char line[96];
    std::snprintf(line, sizeof line, "%llx %llx %s %c\n",
                  static_cast<unsigned long long>(r.pc),
                  static_cast<unsigned long long>(r.target), to_string(r.kind),
                  r.taken ? 'T' : 'N');
    *out_ << line;
  } else {
    unsigned char buf[kTraceRecordBytes];
    store_le64(buf, r.pc);
    store_le64(buf + 8, r.target);
    buf[16] = static_cast<unsigned char>(r.kind);
    buf[17] = r.taken ? 1 : 0;
    out_->write(reinterpret_cast<const char*>(buf), kTraceRecordBytes);
  }
  ++records_;
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open trace file: " + path);
  TraceReader reader(in);
  std::vector<TraceRecord> out;
  while (auto r = reader.next()) out.push_back(*r);
  return out;
}

void write_trace_file(const std::string& path, const std::vector<TraceRecord>& records,
                      bool text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  TraceWriter writer(out, text);
  for (const auto& r : records) writer.write(r);
  if (!out) throw DataError("write failure on " + path);
}

}  // namespace fdipx
