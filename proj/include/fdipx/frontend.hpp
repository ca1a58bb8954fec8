/*
 * Decoupled front-end building blocks: fetch target queue, return address
 * stack, recent-prefetch filter, and the L1-I model with in-flight fills.
 *
 * All components are plain deterministic state machines; the cycle loop in
 * sim.cpp owns the clock and wires them together.
 */
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "fdipx/types.hpp"

namespace fdipx {

inline constexpr addr_t kCacheBlockBytes = 64;

constexpr addr_t block_addr(addr_t a) { return a & ~(kCacheBlockBytes - 1); }

// Predicted-taken branch that ends an FTQ region.  Absent when the region
// ended at the scan bandwidth limit or a block-length boundary.
struct TerminatingBranch {
  addr_t pc = 0;
  BranchKind kind = BranchKind::NotABranch;
  addr_t predicted_target = 0;
};

struct FtqEntry {
  addr_t start = 0;
  std::uint32_t length = 1;  // instructions
  addr_t predicted_next = 0;
  std::optional<TerminatingBranch> terminator;
  std::uint32_t consumed = 0;  // fetch progress within the region

  addr_t end() const { return start + 4ull * length; }
};

// Bounded FIFO of predicted fetch regions.  The head is the fetch point; the
// prefetch scan cursor walks entries beyond the head and survives retirement.
class Ftq {
 public:
  explicit Ftq(std::uint32_t capacity) : capacity_(capacity) {}

  bool full() const { return entries_.size() >= capacity_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::uint32_t capacity() const { return capacity_; }

  void push(const FtqEntry& e) {
    assert(!full());
    entries_.push_back(e);
  }

  FtqEntry& head() { return entries_.front(); }

  void retire_head() {
    assert(!entries_.empty());
    entries_.pop_front();
    if (cursor_ > 1) --cursor_;
  }

  void flush() {
    entries_.clear();
    cursor_ = 1;
  }

  // Next unscanned entry for the prefetcher, or nothing if all entries past
  // the head have been scanned.
  FtqEntry* scan_next() {
    if (cursor_ >= entries_.size()) return nullptr;
    return &entries_[cursor_++];
  }

 private:
  std::deque<FtqEntry> entries_;
  std::uint32_t capacity_;
  std::size_t cursor_ = 1;  // never points at the head
};

// Bounded LIFO of return addresses; overflow discards the deepest entry,
// underflow reports a miss so the caller can resteer when the return commits.
class ReturnAddressStack {
 public:
  explicit ReturnAddressStack(std::uint32_t capacity) : capacity_(capacity) {}

  void push(addr_t ret) {
    if (stack_.size() >= capacity_) stack_.pop_front();
    stack_.push_back(ret);
  }

  std::optional<addr_t> pop() {
    if (stack_.empty()) return std::nullopt;
    const addr_t r = stack_.back();
    stack_.pop_back();
    return r;
  }

  std::size_t size() const { return stack_.size(); }

 private:
  std::deque<addr_t> stack_;
  std::uint32_t capacity_;
};

// Fully-associative FIFO of recently prefetched cache blocks.
class PrefetchFilter {
 public:
  explicit PrefetchFilter(std::uint32_t capacity = 10) : capacity_(capacity) {}

  bool contains(addr_t block) const {
    for (addr_t b : fifo_)
      if (b == block) return true;
    return false;
  }

  void record(addr_t block) {
    if (fifo_.size() >= capacity_) fifo_.pop_front();
    fifo_.push_back(block);
  }

  std::size_t size() const { return fifo_.size(); }

 private:
  std::deque<addr_t> fifo_;
  std::uint32_t capacity_;
};

// Set-associative instruction cache with per-set LRU and a fill queue.  The
// prefetched flag rides along so demand touches can classify hits; untouched
// distinguishes the first demand use of a prefetched line.
class L1ICache {
 public:
  L1ICache(std::uint32_t sets, std::uint32_t ways) : sets_(sets), ways_(ways) {
    if (sets == 0 || (sets & (sets - 1)) != 0)
      throw ConfigError("l1i sets must be a power of two");
    if (ways == 0) throw ConfigError("l1i ways must be positive");
    lines_.resize(std::size_t{sets} * ways);
  }

  std::uint64_t capacity_blocks() const { return std::uint64_t{sets_} * ways_; }

  bool resident(addr_t block) const { return find(block) != nullptr; }

  bool is_in_flight(addr_t block) const { return in_flight_.count(block) != 0; }

  // Completion cycle of an in-flight fill; only valid if is_in_flight.
  std::uint64_t ready_at(addr_t block) const { return in_flight_.at(block).ready; }

  void start_fill(addr_t block, std::uint64_t complete_at, bool prefetched) {
    assert(!resident(block) && !is_in_flight(block));
    in_flight_.emplace(block, Fill{complete_at, prefetched});
  }

  // Promote every fill that has completed by `now` into the cache.
  void install_due(std::uint64_t now) {
    for (auto it = in_flight_.begin(); it != in_flight_.end();) {
      if (it->second.ready <= now) {
        install(it->first, it->second.prefetched);
        it = in_flight_.erase(it);
      } else {
        ++it;
      }
    }
  }

  struct TouchResult {
    bool hit = false;
    bool prefetched_line = false;
    bool first_use = false;  // first demand touch of a prefetched line
  };

  // Demand access to a (potentially) resident block: bumps LRU on hit.
  TouchResult touch_demand(addr_t block) {
    TouchResult r;
    if (Line* l = find(block)) {
      r.hit = true;
      r.prefetched_line = l->prefetched;
      r.first_use = l->prefetched && l->untouched;
      l->untouched = false;
      l->last_used = ++tick_;
    }
    return r;
  }

 private:
  struct Fill {
    std::uint64_t ready = 0;
    bool prefetched = false;
  };

  struct Line {
    bool valid = false;
    addr_t block = 0;
    bool prefetched = false;
    bool untouched = false;
    std::uint64_t last_used = 0;
  };

  Line* find(addr_t block) {
    Line* base = &lines_[set_of(block) * ways_];
    for (std::uint32_t w = 0; w < ways_; ++w)
      if (base[w].valid && base[w].block == block) return &base[w];
    return nullptr;
  }
  const Line* find(addr_t block) const {
    return const_cast<L1ICache*>(this)->find(block);
  }

  std::size_t set_of(addr_t block) const {
    return static_cast<std::size_t>((block / kCacheBlockBytes) & (sets_ - 1));
  }

  void install(addr_t block, bool prefetched) {
    Line* base = &lines_[set_of(block) * ways_];
    Line* slot = nullptr;
    for (std::uint32_t w = 0; w < ways_; ++w)
      if (!base[w].valid) { slot = &base[w]; break; }
    if (slot == nullptr) {
      std::uint64_t oldest = ~std::uint64_t{0};
      for (std::uint32_t w = 0; w < ways_; ++w)
        if (base[w].last_used < oldest) { oldest = base[w].last_used; slot = &base[w]; }
    }
    slot->valid = true;
    slot->block = block;
    slot->prefetched = prefetched;
    slot->untouched = prefetched;
    slot->last_used = ++tick_;
  }

  std::uint32_t sets_, ways_;
  std::vector<Line> lines_;
  std::map<addr_t, Fill> in_flight_;
  std::uint64_t tick_ = 0;
};

}  // namespace fdipx
