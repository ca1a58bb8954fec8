// Front-end building blocks: FTQ, return stack, prefetch filter, L1-I model.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "fdipx/frontend.hpp"

using namespace fdipx;

namespace {

FtqEntry entry(addr_t start, std::uint32_t len) {
  FtqEntry e;
  e.start = start;
  e.length = len;
  e.predicted_next = start + 4ull * len;
  return e;
}

}  // namespace

TEST_CASE("ftq holds at most its capacity") {
  Ftq q(4);
  CHECK(q.empty());
  for (int i = 0; i < 4; ++i) {
    CHECK_FALSE(q.full());
    q.push(entry(0x1000 + 0x100 * i, 8));
  }
  CHECK(q.full());
  CHECK(q.size() == 4);
  q.retire_head();
  CHECK_FALSE(q.full());
  CHECK(q.size() == 3);
  CHECK(q.head().start == 0x1100);
}

TEST_CASE("ftq scan cursor walks entries beyond the head exactly once") {
  Ftq q(8);
  for (int i = 0; i < 4; ++i) q.push(entry(0x1000 + 0x100 * i, 4));

  // Head (0x1000) is never scanned; the rest come out in order.
  std::vector<addr_t> seen;
  while (FtqEntry* e = q.scan_next()) seen.push_back(e->start);
  CHECK(seen == std::vector<addr_t>{0x1100, 0x1200, 0x1300});
  CHECK(q.scan_next() == nullptr);

  // New entries become scannable; old ones stay consumed.
  q.push(entry(0x2000, 4));
  FtqEntry* e = q.scan_next();
  REQUIRE(e != nullptr);
  CHECK(e->start == 0x2000);
  CHECK(q.scan_next() == nullptr);
}

TEST_CASE("ftq retire keeps the scan position; flush resets it") {
  Ftq q(8);
  for (int i = 0; i < 3; ++i) q.push(entry(0x1000 + 0x100 * i, 4));
  CHECK(q.scan_next()->start == 0x1100);
  q.retire_head();  // 0x1100 becomes the head; it was already scanned
  CHECK(q.scan_next()->start == 0x1200);
  CHECK(q.scan_next() == nullptr);

  q.flush();
  CHECK(q.empty());
  q.push(entry(0x3000, 4));
  q.push(entry(0x3100, 4));
  FtqEntry* e = q.scan_next();
  REQUIRE(e != nullptr);
  CHECK(e->start == 0x3100);
}

TEST_CASE("ftq entry covers [start, end)") {
  const FtqEntry e = entry(0x1000, 8);
  CHECK(e.end() == 0x1020);
  const FtqEntry one = entry(0x2000, 1);
  CHECK(one.end() == 0x2004);
}

TEST_CASE("return stack is LIFO") {
  ReturnAddressStack ras(8);
  ras.push(0x1004);
  auto top = ras.pop();
  REQUIRE(top.has_value());
  CHECK(*top == 0x1004);

  ras.push(0x10);
  ras.push(0x20);
  ras.push(0x30);
  CHECK(ras.pop() == 0x30);
  CHECK(ras.pop() == 0x20);
  CHECK(ras.pop() == 0x10);
}

TEST_CASE("return stack pop on empty returns nothing") {
  ReturnAddressStack ras(4);
  CHECK_FALSE(ras.pop().has_value());
  ras.push(0x44);
  CHECK(ras.pop() == 0x44);
  CHECK_FALSE(ras.pop().has_value());
}

TEST_CASE("return stack overflow drops the oldest frame") {
  const std::uint32_t cap = 8;
  ReturnAddressStack ras(cap);
  for (std::uint32_t i = 0; i <= cap; ++i) ras.push(0x1000 + 4ull * i);
  // cap+1 pushes: the newest cap survive, the deepest frame is gone.
  for (std::uint32_t i = cap; i >= 1; --i) CHECK(ras.pop() == 0x1000 + 4ull * i);
  CHECK_FALSE(ras.pop().has_value());
}

TEST_CASE("prefetch filter remembers recent blocks") {
  PrefetchFilter f;
  CHECK_FALSE(f.contains(0x1000));
  f.record(0x1000);
  f.record(0x1040);
  CHECK(f.contains(0x1000));
  CHECK(f.contains(0x1040));
  CHECK_FALSE(f.contains(0x1080));
}

TEST_CASE("prefetch filter keeps the 10 most recent blocks") {
  PrefetchFilter f;
  for (int i = 0; i < 11; ++i) f.record(0x40ull * i);
  // 11 distinct records: the first is evicted, the other 10 remain.
  CHECK_FALSE(f.contains(0x0));
  for (int i = 1; i < 11; ++i) CHECK(f.contains(0x40ull * i));

  f.record(0x0);  // and it may be recorded again
  CHECK(f.contains(0x0));
  CHECK_FALSE(f.contains(0x40));
}

TEST_CASE("l1i fills become visible when their latency elapses") {
  L1ICache c(4, 2);
  CHECK_FALSE(c.resident(0x1000));
  c.start_fill(0x1000, 30, false);
  CHECK(c.is_in_flight(0x1000));
  CHECK_FALSE(c.resident(0x1000));

  c.install_due(29);
  CHECK_FALSE(c.resident(0x1000));
  c.install_due(30);
  CHECK(c.resident(0x1000));
  CHECK_FALSE(c.is_in_flight(0x1000));

  const auto t = c.touch_demand(0x1000);
  CHECK(t.hit);
  CHECK_FALSE(t.prefetched_line);
}

TEST_CASE("l1i reports remaining time of an in-flight fill") {
  L1ICache c(4, 2);
  c.start_fill(0x2000, 130, true);  // issued at 100, 30-cycle fill
  c.install_due(127);
  const auto t = c.touch_demand(0x2000);
  CHECK_FALSE(t.hit);
  CHECK(c.is_in_flight(0x2000));
  CHECK(c.ready_at(0x2000) == 130);  // 3 cycles left at now = 127
}

TEST_CASE("l1i prefetched lines report first use once") {
  L1ICache c(4, 2);
  c.start_fill(0x3000, 10, true);
  c.install_due(10);
  const auto first = c.touch_demand(0x3000);
  CHECK(first.hit);
  CHECK(first.prefetched_line);
  CHECK(first.first_use);
  const auto again = c.touch_demand(0x3000);
  CHECK(again.hit);
  CHECK(again.prefetched_line);
  CHECK_FALSE(again.first_use);
}

TEST_CASE("l1i evicts the least recently used way") {
  L1ICache c(4, 2);  // 4 sets: blocks 0x000, 0x100, 0x200 share set 0
  c.start_fill(0x000, 1, false);
  c.start_fill(0x100, 2, false);
  c.install_due(2);
  CHECK(c.touch_demand(0x000).hit);  // at t=3: 0x000 is now the hot way
  c.start_fill(0x200, 4, false);
  c.install_due(4);
  CHECK(c.resident(0x000));
  CHECK_FALSE(c.resident(0x100));  // cold way lost its slot
  CHECK(c.resident(0x200));
}

TEST_CASE("l1i distinguishes sets") {
  L1ICache c(4, 1);
  c.start_fill(0x000, 1, false);
  c.start_fill(0x040, 1, false);  // set 1: does not displace set 0
  c.install_due(1);
  CHECK(c.resident(0x000));
  CHECK(c.resident(0x040));
}
