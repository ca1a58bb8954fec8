#include "fdipx/trace_gen.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace fdipx {

namespace {

constexpr addr_t kBase = 0x10000000;
constexpr int kLayoutAttempts = 16;

// Offset class bounds in instruction words.
constexpr std::uint64_t kClassLo[4] = {1, 256, 8192, 1ull << 23};
constexpr std::uint64_t kClassHi[4] = {255, 8191, (1ull << 23) - 1, (1ull << 46) - 1};

// Hand-rolled sampling so traces are stable across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) { return n ? rng() % n : 0; }

std::uint64_t range_sample(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  assert(lo <= hi);
  return lo + bounded(rng, hi - lo + 1);
}

struct ChainUnit {
  addr_t start = 0;
  std::uint32_t pre = 0, post = 0;
  bool leaf = false;

  std::uint32_t instrs() const { return leaf ? pre + 1 : pre + 1 + post + 1; }
  std::uint64_t bytes() const { return 4ull * instrs(); }
  addr_t call_pc() const { return start + 4ull * pre; }
  addr_t ret_pc() const {
    return leaf ? start + 4ull * pre : start + 4ull * (pre + 1 + post);
  }
};

struct RingBlock {
  addr_t start = 0;
  std::uint32_t body = 0;
  std::uint32_t post = 0;        // instrs between call return and terminator
  std::vector<ChainUnit> chain;  // nonempty = block calls a function chain
  int klass = 0;
  BranchKind term = BranchKind::UnconditionalDirect;
  bool nt_cycling = false;  // falls through one lap in four
  std::uint32_t phase = 0;
  addr_t target = 0;

  bool has_call() const { return !chain.empty(); }
  std::uint32_t instrs() const { return body + (has_call() ? 1 + post : 0) + 1; }
  std::uint64_t bytes() const { return 4ull * instrs(); }
  addr_t call_pc() const { return start + 4ull * body; }
  addr_t term_pc() const { return start + 4ull * (instrs() - 1); }
};

class Allocator {
 public:
  Allocator(addr_t base, addr_t end) : base_(base), end_(end) {}

  bool free_range(addr_t s, addr_t e) const {
    if (s < base_ || e > end_ || s >= e) return false;
    auto it = occ_.upper_bound(s);
    if (it != occ_.begin() && std::prev(it)->second > s) return false;
    return it == occ_.end() || it->first >= e;
  }
  void claim(addr_t s, addr_t e) {
    assert(free_range(s, e));
    occ_.emplace(s, e);
  }
  void release(addr_t s) { occ_.erase(s); }

 private:
  std::map<addr_t, addr_t> occ_;
  addr_t base_, end_;
};

struct Plan {
  std::uint32_t ring = 0;
  std::vector<std::uint32_t> chains;  // per depth d (index d-1)
  std::array<std::uint32_t, 5> quota{};
  std::uint32_t chain_sites = 0;  // ring calls + unit calls/returns
};

Plan solve_structure(const GeneratorSpec& spec) {
  const std::uint32_t S = spec.static_branch_count;
  if (S < 8) throw ConfigError("static_branch_count must be at least 8");
  if (S > 2000000) throw ConfigError("static_branch_count above the 2e6 limit");
  double wsum = 0;
  for (double x : spec.call_depth_weights) {
    if (!(x >= 0.0) || !(x <= 1.0))
      throw ConfigError("call_depth_weights entries must lie in [0,1]");
    wsum += x;
  }
  if (wsum > 1.0 + 1e-9) throw ConfigError("call_depth_weights must sum to at most 1");

  const auto total_for = [&](std::uint32_t R) {
    std::uint64_t t = R;
    for (std::size_t d = 1; d <= spec.call_depth_weights.size(); ++d)
      t += static_cast<std::uint64_t>(std::llround(spec.call_depth_weights[d - 1] * R)) * 2 * d;
    return t;
  };
  std::uint32_t R = S;
  while (R > 8 && total_for(R) > S) --R;
  if (total_for(R) > S)
    throw ConfigError("static_branch_count too small for call_depth_weights");

  Plan p;
  p.chains.resize(spec.call_depth_weights.size());
  std::uint64_t call_blocks = 0;
  for (std::size_t d = 1; d <= p.chains.size(); ++d) {
    p.chains[d - 1] =
        static_cast<std::uint32_t>(std::llround(spec.call_depth_weights[d - 1] * R));
    call_blocks += p.chains[d - 1];
    p.chain_sites += p.chains[d - 1] * 2 * static_cast<std::uint32_t>(d);
  }
  p.ring = R + static_cast<std::uint32_t>(S - total_for(R));
  if (call_blocks > p.ring)
    throw ConfigError("call_depth_weights ask for more than one chain per block");
  return p;
}

void solve_quota(Plan& p, const std::array<double, 5>& mix) {
  double wn[5];
  double sum = 0;
  for (int c = 0; c < 5; ++c) {
    if (!(mix[c] >= 0.0)) throw ConfigError("offset_mix entries must be non-negative");
    sum += mix[c];
  }
  if (!(sum > 0.0)) throw ConfigError("offset_mix must have positive weight");
  for (int c = 0; c < 5; ++c) wn[c] = mix[c] / sum;

  // Chains inject near-offset call takens every lap; near-class conditionals
  // average 11/12 taken because one in three of them skips one lap in four.
  double x0 = 0;
  for (std::size_t d = 1; d <= p.chains.size(); ++d) x0 += double(p.chains[d - 1]) * double(d);
  const double p0 = 11.0 / 12.0;
  const double B = p.ring;
  const double T = (B + x0 / p0) / (wn[0] / p0 + (1.0 - wn[0]));
  double raw[5];
  raw[0] = std::max(0.0, (wn[0] * T - x0) / p0);
  for (int c = 1; c < 5; ++c) raw[c] = wn[c] * T;
  double rsum = raw[0] + raw[1] + raw[2] + raw[3] + raw[4];
  if (!(rsum > 0.0)) {
    raw[0] = B;
    rsum = B;
  }
  for (int c = 0; c < 5; ++c) raw[c] *= B / rsum;

  // Largest remainder rounding to exactly B terminators.
  std::uint64_t used = 0;
  double frac[5];
  for (int c = 0; c < 5; ++c) {
    p.quota[c] = static_cast<std::uint32_t>(raw[c]);
    frac[c] = raw[c] - double(p.quota[c]);
    used += p.quota[c];
  }
  int order[5] = {0, 1, 2, 3, 4};
  std::sort(order, order + 5, [&](int a, int b) {
    return frac[a] != frac[b] ? frac[a] > frac[b] : a < b;
  });
  for (int k = 0; used < p.ring; ++k) {
    ++p.quota[order[k % 5]];
    ++used;
  }
}

struct Layout {
  std::vector<RingBlock> blocks;
  int wide_class = 0;
};

// Class/kind/shape assignment for one layout attempt.
Layout build_blocks(const Plan& plan, std::mt19937_64& rng) {
  const std::uint32_t B = plan.ring;
  std::vector<int> klass;
  klass.reserve(B);
  for (int c = 0; c < 5; ++c)
    klass.insert(klass.end(), plan.quota[c], c);
  for (std::size_t i = klass.size(); i > 1; --i)
    std::swap(klass[i - 1], klass[bounded(rng, i)]);

  Layout L;
  L.wide_class = plan.quota[4] ? 4 : plan.quota[3] ? 3 : plan.quota[2] ? 2 : plan.quota[1] ? 1 : 0;
  // Rotate a widest-class terminator into the closing position so the ring
  // can always be closed back to block 0.
  for (std::uint32_t j = 0; j < B; ++j) {
    if (klass[j] == L.wide_class) {
      std::rotate(klass.begin(), klass.begin() + ((j + 1) % B), klass.end());
      break;
    }
  }

  L.blocks.resize(B);
  for (std::uint32_t i = 0; i < B; ++i) L.blocks[i].klass = klass[i];

  // Spread call chains across the ring.
  std::vector<std::uint32_t> depths;
  for (std::size_t d = 1; d <= plan.chains.size(); ++d)
    depths.insert(depths.end(), plan.chains[d - 1], static_cast<std::uint32_t>(d));
  const std::uint64_t C = depths.size();
  for (std::uint64_t k = 0; k < C; ++k) {
    RingBlock& b = L.blocks[k * B / C];
    b.body = static_cast<std::uint32_t>(range_sample(rng, 2, 5));
    b.post = static_cast<std::uint32_t>(range_sample(rng, 1, 4));
    b.chain.resize(depths[k]);
    for (std::uint32_t u = 0; u < depths[k]; ++u) {
      ChainUnit& cu = b.chain[u];
      cu.leaf = u + 1 == depths[k];
      cu.pre = static_cast<std::uint32_t>(range_sample(rng, 1, 4));
      cu.post = cu.leaf ? 0 : static_cast<std::uint32_t>(range_sample(rng, 1, 3));
    }
  }
  std::uint32_t near_idx = 0;
  bool toggle[4] = {};
  for (std::uint32_t i = 0; i < B; ++i) {
    RingBlock& b = L.blocks[i];
    if (!b.has_call()) b.body = static_cast<std::uint32_t>(range_sample(rng, 3, 8));
    if (b.klass == 4) {
      b.term = BranchKind::IndirectJump;
      continue;
    }
    if (b.klass == 0) {
      if (i + 1 == B) {
        b.term = BranchKind::UnconditionalDirect;
        continue;
      }
      switch (near_idx++ % 3) {
        case 0:
          b.term = BranchKind::ConditionalDirect;
          b.nt_cycling = true;
          b.phase = i % 4;
          break;
        case 1:
          b.term = BranchKind::ConditionalDirect;
          break;
        default:
          b.term = BranchKind::UnconditionalDirect;
          break;
      }
    } else {
      toggle[b.klass] = !toggle[b.klass];
      b.term = toggle[b.klass] ? BranchKind::ConditionalDirect
                               : BranchKind::UnconditionalDirect;
    }
  }
  // Narrow rings park the walk beside a held patch before closing; a plain
  // edge into the patch is enough, a fall-through filler would not fit.
  if (L.wide_class == 0 && B >= 2) L.blocks[B - 2].nt_cycling = false;
  return L;
}

struct PlacementFailure {};

void place_chain(RingBlock& b, Allocator& alloc, std::mt19937_64& rng, addr_t lo_bound,
                 addr_t hi_bound) {
  addr_t anchor = b.call_pc();
  for (ChainUnit& cu : b.chain) {
    bool done = false;
    for (int t = 0; t < 96 && !done; ++t) {
      const addr_t lo = anchor > lo_bound + 1020 ? anchor - 1020 : lo_bound;
      const addr_t hi = std::min<addr_t>(anchor + 1020, hi_bound);
      if (hi <= lo + cu.bytes()) break;
      addr_t st = lo + 4 * bounded(rng, (hi - lo - cu.bytes()) / 4 + 1);
      st &= ~0x3ull;
      if (!alloc.free_range(st, st + cu.bytes())) continue;
      const std::uint64_t m = st > anchor ? (st - anchor) / 4 : (anchor - st) / 4;
      if (m < 1 || m > kClassHi[0]) continue;
      alloc.claim(st, st + cu.bytes());
      cu.start = st;
      done = true;
    }
    if (!done) throw PlacementFailure{};
    anchor = cu.call_pc();
  }
}

std::uint64_t hi_eff(int c, std::uint64_t footprint_words) {
  return std::min(kClassHi[c], footprint_words > 64 ? footprint_words - 64 : 0);
}

void place_blocks(Layout& L, const GeneratorSpec& spec, std::mt19937_64& rng) {
  const std::uint32_t B = static_cast<std::uint32_t>(L.blocks.size());
  const addr_t end = kBase + spec.code_footprint_bytes;
  const std::uint64_t fwords = spec.code_footprint_bytes / 4;
  Allocator alloc(kBase, end);
  // Block 0 sits mid-region so the ring can close from either side.
  const addr_t a0 = kBase + ((spec.code_footprint_bytes / 2) & ~0x3ull);

  // A cycling conditional falls through into straight-line filler, so the
  // words just past its terminator must stay open until its successor is
  // placed.  Reserve that runway with the block and release it at the edge.
  constexpr std::uint64_t kNtRunway = 96;

  L.blocks[0].start = a0;
  alloc.claim(a0, a0 + L.blocks[0].bytes());
  if (L.blocks[0].nt_cycling)
    alloc.claim(a0 + L.blocks[0].bytes(), a0 + L.blocks[0].bytes() + kNtRunway);

  // A near-offset closing edge can only land within ~1 KiB of block 0, so
  // hold a small patch below it for the final block until it is placed.
  // The rest of that neighborhood stays open for the walk to park in.
  addr_t hold = 0;
  constexpr std::uint64_t kHoldBytes = 128;
  if (L.wide_class == 0 && a0 >= kBase + 1024) {
    // Keep the patch where a closing hop of at most 255 words reaches
    // block 0 from anywhere inside it.
    for (addr_t s = a0 - 768; s + 768 >= a0 && s >= kBase + 128; s -= 64) {
      if (alloc.free_range(s, s + kHoldBytes)) {
        hold = s;
        alloc.claim(s, s + kHoldBytes);
        break;
      }
    }
  }
  place_chain(L.blocks[0], alloc, rng, kBase, end);

  // Late-walk homing target: for narrow-only rings aim at the held closure
  // patch rather than at block 0 itself.
  const addr_t anchor = L.wide_class == 0 ? (hold ? hold + 64 : a0 - 704) : a0;

  // Remaining reach of edges i..B-2 plus the closing edge, saturated at the
  // footprint.  Keeping |block - block0| under this makes the ring closable;
  // narrow rings discount reach so fillers and forced-forward hops have slack.
  const std::uint64_t closure_reach =
      L.wide_class == 4 ? spec.code_footprint_bytes : 4 * hi_eff(L.wide_class, fwords);
  std::vector<std::uint64_t> allow(B, spec.code_footprint_bytes);
  {
    std::uint64_t suffix = 0;
    for (std::uint32_t j = B - 1; j >= 1; --j) {
      allow[j] = std::min<std::uint64_t>(spec.code_footprint_bytes,
                                         suffix + closure_reach + 4096);
      const int c = L.blocks[j - 1].klass;
      std::uint64_t reach = c == 4 ? spec.code_footprint_bytes : 4 * hi_eff(c, fwords);
      if (L.wide_class == 0) reach = reach * 3 / 4;
      suffix = std::min<std::uint64_t>(spec.code_footprint_bytes, suffix + reach);
    }
  }

  bool homing = false;  // narrow rings: one-way switch from climb to descent
  for (std::uint32_t i = 1; i < B; ++i) {
    RingBlock& prev = L.blocks[i - 1];
    RingBlock& nb = L.blocks[i];
    const addr_t cur = prev.term_pc();
    const int c = prev.klass;
    const bool last = i + 1 == B;
    const std::uint32_t edges_left = B - 1 - i;
    const std::uint64_t adist = cur > anchor ? (cur - anchor) / 4 : (anchor - cur) / 4;
    // Turn back once the remaining edges can only just cover the distance.
    if (L.wide_class == 0 && !homing && (2 * i > B || adist >= 90ull * std::max(1u, edges_left)))
      homing = true;
    bool placed = false;
    if (last && hold) alloc.release(hold);  // closing block may use the patch
    if (prev.nt_cycling) alloc.release(cur + 4);  // hand the runway to this edge

    for (int t = 0; t < 768 && !placed; ++t) {
      addr_t st = 0;
      if (last && L.wide_class != 4) {
        // Place the final block so its terminator closes back to block 0
        // within the widest class, then check the incoming edge.
        const addr_t off = 4ull * (nb.instrs() - 1);
        addr_t tpc;
        if (L.wide_class == 0 && hold) {
          st = hold + 4 * bounded(rng, (kHoldBytes - nb.bytes()) / 4 + 1);
          tpc = st + off;
        } else {
          const std::uint64_t mw =
              range_sample(rng, kClassLo[L.wide_class],
                           std::max(kClassLo[L.wide_class], hi_eff(L.wide_class, fwords)));
          tpc = bounded(rng, 2) ? a0 + 4 * mw : (a0 > 4 * mw ? a0 - 4 * mw : 0);
          if (tpc == 0 || tpc < off) continue;
          st = tpc - off;
        }
        const std::uint64_t mc = tpc > a0 ? (tpc - a0) / 4 : (a0 - tpc) / 4;
        if (mc < kClassLo[L.wide_class] ||
            mc > std::max(kClassLo[L.wide_class], hi_eff(L.wide_class, fwords)))
          continue;
        if (prev.nt_cycling) {
          if (st <= cur + 4 || st > cur + 4 * kClassHi[0]) continue;
        } else if (c != 4) {
          const std::uint64_t m = st > cur ? (st - cur) / 4 : (cur - st) / 4;
          if (m < kClassLo[c] || m > kClassHi[c]) continue;
        }
      } else if (prev.nt_cycling) {
        // Fillers are capped below the class reach so a solid skipped span
        // never walls off later near-offset hops.
        std::uint64_t m;
        if (L.wide_class == 0 && homing) {
          m = range_sample(rng, 2, 12);  // descent phase: keep forward drift small
        } else {
          m = range_sample(rng, 2, 180);
        }
        st = cur + 4 * m;
      } else if (c == 4) {
        st = kBase + 4 * bounded(rng, fwords);
        st &= ~0x3ull;
      } else {
        std::uint64_t lo = kClassLo[c];
        std::uint64_t hi = std::max(lo, hi_eff(c, fwords));
        std::uint64_t m = range_sample(rng, lo, hi);
        bool fwd = bounded(rng, 2) != 0;
        const std::uint64_t dist = cur > a0 ? (cur - a0) / 4 : (a0 - cur) / 4;
        if (L.wide_class == 0) {
          // Narrow-only ring: sweep upward away from the closure zone, then
          // walk back down to the anchor beside the held band so the closing
          // near-offset jump can reach block 0.
          if (!homing) {
            fwd = true;
            m = range_sample(rng, lo, kClassHi[0]);
          } else if (adist <= (i + 2 >= B ? 150 : 200)) {
            // Parked beside the patch: wander enough to find free slots in
            // the crowded neighborhood, tighter as the closing edge nears.
            std::uint64_t cap;
            if (i + 3 >= B) cap = 48;
            else if (i + 6 >= B) cap = 120;
            else cap = bounded(rng, 3) == 0 ? kClassHi[0] : 48;
            m = range_sample(rng, lo, cap);
          } else {
            if (adist <= 200 + kClassHi[0]) {
              // Aim just short of the patch so the landing stays outside it.
              m = std::clamp<std::uint64_t>(adist - 100 - bounded(rng, 64), lo,
                                            kClassHi[0]);
            } else {
              // Mostly take hops scaled to the per-edge distance still to
              // cover so the descent outruns the fall-through drift, but
              // keep some short tries for squeezing past claimed spans.
              const std::uint64_t need = adist / std::max(1u, edges_left);
              const std::uint64_t floor_m =
                  std::clamp<std::uint64_t>(need + need / 2, 64, 240);
              m = range_sample(rng, bounded(rng, 3) ? floor_m : lo, kClassHi[0]);
            }
            fwd = anchor > cur;
          }
        } else if (edges_left <= 2 && L.wide_class != 4) {
          // Aim the tail of the walk into the closing class's reach band.
          const std::uint64_t band = std::clamp<std::uint64_t>(
              2 * kClassLo[L.wide_class], kClassLo[L.wide_class], hi_eff(L.wide_class, fwords));
          if (dist > band) {
            m = std::clamp<std::uint64_t>((dist - band) / (edges_left + 1) + 1, lo, hi);
            fwd = a0 > cur;
          } else if (dist < kClassLo[L.wide_class]) {
            m = std::clamp<std::uint64_t>(kClassLo[L.wide_class] - dist + band, lo, hi);
            fwd = a0 <= cur;
          }
        }
        if (fwd) {
          st = cur + 4 * m;
        } else {
          if (cur < kBase + 4 * m) continue;
          st = cur - 4 * m;
        }
      }

      if (st < kBase || st + nb.bytes() > end) continue;
      if (!last) {
        const std::uint64_t dist_next = st > a0 ? st - a0 : a0 - st;
        if (dist_next > allow[i]) continue;
      }
      const std::uint64_t tailway = nb.nt_cycling ? kNtRunway : 0;
      if (prev.nt_cycling) {
        if (!alloc.free_range(cur + 4, st + nb.bytes() + tailway)) continue;
        alloc.claim(cur + 4, st);
        alloc.claim(st, st + nb.bytes());
      } else {
        if (!alloc.free_range(st, st + nb.bytes() + tailway)) continue;
        alloc.claim(st, st + nb.bytes());
      }
      if (tailway) alloc.claim(st + nb.bytes(), st + nb.bytes() + tailway);
      nb.start = st;
      place_chain(nb, alloc, rng, kBase, end);
      placed = true;
    }
    if (!placed) throw PlacementFailure{};
  }

  // Ring closure: verify the final edge really lands in its class.
  const RingBlock& lastb = L.blocks[B - 1];
  if (lastb.klass != 4) {
    const addr_t tpc = lastb.term_pc();
    const std::uint64_t m = tpc > a0 ? (tpc - a0) / 4 : (a0 - tpc) / 4;
    if (m < kClassLo[lastb.klass] || m > kClassHi[lastb.klass]) throw PlacementFailure{};
  }
  for (std::uint32_t i = 0; i < B; ++i) L.blocks[i].target = L.blocks[(i + 1) % B].start;
}

struct Emitter {
  const TraceSink& sink;
  std::uint64_t cap;
  std::uint64_t n = 0;

  bool emit(addr_t pc, addr_t tgt, BranchKind k, bool taken) {
    if (n >= cap) return false;
    const TraceRecord r{pc, tgt, k, taken};
    assert(!validate_record(r).has_value());
    sink(r);
    ++n;
    return true;
  }
  bool straight(addr_t from, std::uint64_t count) {
    for (std::uint64_t k = 0; k < count; ++k)
      if (!emit(from + 4 * k, 0, BranchKind::NotABranch, false)) return false;
    return true;
  }
};

bool walk_chain(Emitter& em, const std::vector<ChainUnit>& units, std::size_t j,
                addr_t ret_to) {
  const ChainUnit& u = units[j];
  if (!em.straight(u.start, u.pre)) return false;
  if (u.leaf) return em.emit(u.ret_pc(), ret_to, BranchKind::Return, true);
  if (!em.emit(u.call_pc(), units[j + 1].start, BranchKind::CallDirect, true)) return false;
  if (!walk_chain(em, units, j + 1, u.call_pc() + 4)) return false;
  if (!em.straight(u.call_pc() + 4, u.post)) return false;
  return em.emit(u.ret_pc(), ret_to, BranchKind::Return, true);
}

}  // namespace

GenSummary generate_trace(const GeneratorSpec& spec, const TraceSink& sink) {
  if (spec.code_footprint_bytes < 64 * 1024)
    throw ConfigError("code_footprint_bytes must be at least 64 KiB");
  if (kBase + spec.code_footprint_bytes > kVaLimit)
    throw ConfigError("code_footprint_bytes exceeds the 48-bit address space");

  Plan plan = solve_structure(spec);
  solve_quota(plan, spec.offset_mix);

  const std::uint64_t fwords = spec.code_footprint_bytes / 4;
  for (int c = 0; c < 4; ++c) {
    if (plan.quota[c] && kClassLo[c] >= hi_eff(c, fwords))
      throw ConfigError("code_footprint_bytes too small for offset class " +
                        std::to_string(c));
  }
  // Rough capacity: blocks and chains at worst-case size plus near fillers.
  const std::uint64_t rough =
      std::uint64_t(plan.ring) * 48 + std::uint64_t(plan.chain_sites) * 40 +
      std::uint64_t(plan.quota[0]) * 1024 / 3 + 4096;
  if (rough * 2 > spec.code_footprint_bytes)
    throw ConfigError("code_footprint_bytes too small for static_branch_count");

  std::mt19937_64 rng(spec.seed);
  Layout L;
  bool ok = false;
  for (int attempt = 0; attempt < kLayoutAttempts && !ok; ++attempt) {
    try {
      L = build_blocks(plan, rng);
      place_blocks(L, spec, rng);
      ok = true;
    } catch (const PlacementFailure&) {
    }
  }
  if (!ok)
    throw ConfigError(
        "could not lay out code within code_footprint_bytes; "
        "adjust offset_mix, static_branch_count, or the footprint");

  GenSummary s;
  s.ring_blocks = plan.ring;
  s.chain_sites = plan.chain_sites;
  s.static_branches = plan.ring + plan.chain_sites;
  assert(s.static_branches == spec.static_branch_count);

  Emitter em{sink, spec.instruction_count, 0};
  bool more = true;
  for (std::uint64_t lap = 0; more; ++lap) {
    for (const RingBlock& b : L.blocks) {
      if (!em.straight(b.start, b.body)) {
        more = false;
        break;
      }
      if (b.has_call()) {
        if (!em.emit(b.call_pc(), b.chain[0].start, BranchKind::CallDirect, true) ||
            !walk_chain(em, b.chain, 0, b.call_pc() + 4) ||
            !em.straight(b.call_pc() + 4, b.post)) {
          more = false;
          break;
        }
      }
      const bool taken = !(b.nt_cycling && (lap + b.phase) % 4 == 3);
      if (!em.emit(b.term_pc(), b.target, b.term, taken)) {
        more = false;
        break;
      }
      if (!taken && !em.straight(b.term_pc() + 4, (b.target - b.term_pc()) / 4 - 1)) {
        more = false;
        break;
      }
    }
    if (more) s.laps = lap + 1;
  }
  s.records = em.n;
  return s;
}

std::vector<TraceRecord> generate_trace_records(const GeneratorSpec& spec) {
  std::vector<TraceRecord> out;
  out.reserve(spec.instruction_count);
  generate_trace(spec, [&out](const TraceRecord& r) { out.push_back(r); });
  return out;
}

}  // namespace fdipx
