#include "fdipx/btb.hpp"

#include <limits>

namespace fdipx {

SetAssocBtb::SetAssocBtb(const BtbGeometry& geom) : geom_(geom) {
  geom_.validate();
  sets_.resize(geom_.sets);
  if (geom_.ways != 0)
    for (auto& s : sets_) s.resize(geom_.ways);
}

std::vector<BtbEntry>& SetAssocBtb::set_for(addr_t pc) {
  return sets_[geom_.index_and_tag(pc).set];
}

BtbEntry* SetAssocBtb::find(addr_t pc) {
  const auto it = geom_.index_and_tag(pc);
  for (auto& e : sets_[it.set])
    if (e.valid && e.tag == it.tag) return &e;
  return nullptr;
}

const BtbEntry* SetAssocBtb::find(addr_t pc) const {
  return const_cast<SetAssocBtb*>(this)->find(pc);
}

SetAssocBtb::FillResult SetAssocBtb::fill(addr_t pc, BranchKind kind, bool backward,
                                          std::uint64_t payload, std::uint8_t block_len) {
  assert(is_branch(kind));
  const auto it = geom_.index_and_tag(pc);
  auto& set = sets_[it.set];
  FillResult out;

  if (BtbEntry* hit = find(pc)) {
    hit->kind = kind;
    hit->backward = backward;
    hit->payload = payload;
    hit->block_len = block_len;
    touch(*hit);
    out.updated = true;
    return out;
  }

  BtbEntry* slot = nullptr;
  for (auto& e : set)
    if (!e.valid) { slot = &e; break; }
  if (slot == nullptr) {
    if (geom_.ways == 0) {
      set.emplace_back();
      slot = &set.back();
    } else {
      // LRU victim; last_used stamps are unique so the minimum is unique.
      std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
      for (auto& e : set)
        if (e.last_used < oldest) { oldest = e.last_used; slot = &e; }
      out.evicted = true;
      out.victim = *slot;
    }
  }

  slot->valid = true;
  slot->tag = it.tag;
  slot->kind = kind;
  slot->backward = backward;
  slot->payload = payload;
  slot->block_len = block_len;
  touch(*slot);
  return out;
}

bool SetAssocBtb::invalidate(addr_t pc) {
  if (BtbEntry* hit = find(pc)) {
    *hit = BtbEntry{};
    return true;
  }
  return false;
}

std::uint64_t SetAssocBtb::occupancy() const {
  std::uint64_t n = 0;
  for (const auto& s : sets_)
    for (const auto& e : s)
      if (e.valid) ++n;
  return n;
}

EnsembleBtb::EnsembleBtb(const EnsembleConfig& cfg) : cfg_(cfg) {
  parts_.reserve(4);
  for (const auto& g : cfg_.partitions) parts_.emplace_back(g);
}

std::optional<LookupResult> EnsembleBtb::lookup(addr_t pc) {
  BtbEntry* winner = nullptr;
  int winner_part = -1;
  int hits = 0;
  for (int p = 0; p < 4; ++p) {
    if (BtbEntry* e = parts_[p].find(pc)) {
      ++hits;
      if (winner == nullptr) {
        winner = e;
        winner_part = p;
      }
    }
  }
  if (winner == nullptr) return std::nullopt;

  LookupResult out;
  out.kind = winner->kind;
  out.partition = winner_part;
  out.multi_hit = hits > 1;
  out.block_len = winner->block_len;
  if (winner->kind == BranchKind::Return) {
    out.target_from_ras = true;
  } else if (is_indirect(winner->kind)) {
    out.target = winner->payload << 2;
  } else {
    out.target = apply_offset(pc, {winner->payload, winner->backward});
  }
  parts_[winner_part].touch(*winner);
  return out;
}

InsertResult EnsembleBtb::insert(addr_t pc, BranchKind kind, addr_t target) {
  assert(is_branch(kind));
  InsertResult out;

  bool backward = false;
  std::uint64_t payload = 0;
  SignedOffset off;
  if (is_direct(kind)) {
    off = compute_offset(pc, target);
    payload = off.magnitude;
    backward = off.backward;
  } else if (is_indirect(kind)) {
    payload = word_index(target);
  }

  const int p = select_partition(kind, off);
  if (is_direct(kind))
    assert(min_offset_bits(off) <= cfg_.partitions[p].offset_field_bits &&
           "payload must fit the chosen partition's offset field");

  for (int q = 0; q < 4; ++q)
    if (q != p) parts_[q].invalidate(pc);

  const auto fill = parts_[p].fill(pc, kind, backward, payload, 0);
  out.partition = p;
  out.updated = fill.updated;
  out.evicted = fill.evicted;
  out.victim = fill.victim;
  return out;
}

void EnsembleBtb::invalidate(addr_t pc) {
  for (auto& part : parts_) part.invalidate(pc);
}

std::uint64_t EnsembleBtb::occupancy() const {
  std::uint64_t n = 0;
  for (const auto& part : parts_) n += part.occupancy();
  return n;
}

EnsembleConfig unbounded_ensemble(TagMode tag_mode) {
  EnsembleConfig cfg;
  cfg.baseline_entries = 0;
  for (int p = 0; p < 4; ++p) {
    BtbGeometry g;
    g.sets = 64;
    g.ways = 0;
    g.offset_field_bits = kPartitionOffsetBits[p];
    g.tag_mode = tag_mode;
    g.payload_mode = PayloadMode::OffsetOrTarget;
    g.validate();
    cfg.partitions[p] = g;
  }
  return cfg;
}

}  // namespace fdipx
