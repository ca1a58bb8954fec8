#include "fdipx/sim.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

#include "fdipx/frontend.hpp"

namespace fdipx {

const char* to_string(DirectionPolicy p) {
  return p == DirectionPolicy::Oracle ? "oracle" : "bimodal";
}

std::optional<DirectionPolicy> direction_policy_from_string(std::string_view name) {
  if (name == "oracle") return DirectionPolicy::Oracle;
  if (name == "bimodal") return DirectionPolicy::Bimodal;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (ftq_capacity == 0) throw ConfigError("ftq_capacity must be positive");
  if (fetch_width == 0) throw ConfigError("fetch_width must be positive");
  if (lookup_bandwidth == 0) throw ConfigError("lookup_bandwidth must be positive");
  if (prefetch_scan_rate == 0) throw ConfigError("prefetch_scan_rate must be positive");
  if (miss_latency == 0) throw ConfigError("miss_latency must be positive");
  if (l1i_sets == 0 || (l1i_sets & (l1i_sets - 1)) != 0)
    throw ConfigError("l1i_sets must be a power of two");
  if (l1i_ways == 0) throw ConfigError("l1i_ways must be positive");
  if (ras_capacity == 0) throw ConfigError("ras_capacity must be positive");
  if (bimodal_entries == 0 || (bimodal_entries & (bimodal_entries - 1)) != 0)
    throw ConfigError("bimodal_entries must be a power of two");
}

namespace {

// Straight-line runs split into 31-instruction windows for the block BTB.
constexpr std::uint64_t kBlockCap = 31;

struct Bimodal {
  std::vector<std::uint8_t> ctr;
  explicit Bimodal(std::uint32_t n) : ctr(n, 1) {}
  bool taken(addr_t pc) const { return ctr[word_index(pc) & (ctr.size() - 1)] >= 2; }
  void update(addr_t pc, bool t) {
    std::uint8_t& c = ctr[word_index(pc) & (ctr.size() - 1)];
    if (t) {
      if (c < 3) ++c;
    } else if (c > 0) {
      --c;
    }
  }
};

class Engine {
 public:
  Engine(const SimConfig& cfg, BtbModel& btb, const TraceSource& source)
      : cfg_(cfg),
        btb_(btb),
        source_(source),
        ftq_(cfg.ftq_capacity),
        spec_ras_(cfg.ras_capacity),
        arch_ras_(cfg.ras_capacity),
        l1i_(cfg.l1i_sets, cfg.l1i_ways),
        bimodal_(cfg.bimodal_entries) {}

  SimStats run() {
    if (window_at(0) == nullptr) return st_;  // empty trace
    gen_pc_ = window_[0].pc;
    gen_block_start_ = gen_pc_;
    fetch_block_start_ = gen_pc_;

    std::uint64_t last_progress_cycle = 0;
    std::uint64_t last_committed = 0;
    while (window_at(0) != nullptr) {
      ++now_;
      l1i_.install_due(now_);
      generate();
      fetch();
      if (cfg_.prefetch) prefetch_scan();

      if (committed_ > last_committed) {
        last_committed = committed_;
        last_progress_cycle = now_;
      } else if (now_ - last_progress_cycle > 2'000'000) {
        throw std::logic_error("front end made no progress for 2M cycles");
      }
    }
    st_.cycles = now_;
    return st_;
  }

 private:
  // ---- trace window -----------------------------------------------------

  // Record at `i` positions past the commit point, pulling from the source
  // as needed.  Chain-checks each new record so the committed stream is a
  // single well-formed control-flow walk.
  const TraceRecord* window_at(std::size_t i) {
    while (window_.size() <= i && !source_done_) {
      auto r = source_();
      if (!r) {
        source_done_ = true;
        break;
      }
      const std::uint64_t ordinal = committed_ + window_.size();
      if (auto err = validate_record(*r))
        throw DataError("record " + std::to_string(ordinal) + ": " + *err);
      if (intake_prev_) {
        const addr_t expect =
            intake_prev_->taken ? intake_prev_->target : intake_prev_->pc + 4;
        if (r->pc != expect)
          throw DataError("record " + std::to_string(ordinal) +
                          ": pc breaks sequential flow");
      }
      intake_prev_ = *r;
      window_.push_back(*r);
    }
    return i < window_.size() ? &window_[i] : nullptr;
  }

  // ---- direction policy -------------------------------------------------

  // Direction for a conditional the BPU meets at stream offset `ahead`
  // instructions past the commit point.  The oracle reads the trace when the
  // predicted path is still on it and predicts not-taken off-path.
  bool predict_taken(addr_t pc, std::uint64_t ahead) {
    if (cfg_.direction == DirectionPolicy::Bimodal) return bimodal_.taken(pc);
    const TraceRecord* r = window_at(ahead);
    return r != nullptr && r->pc == pc && r->taken;
  }

  // ---- branch prediction unit -------------------------------------------

  void note_lookup(const std::optional<BtbPrediction>& p) {
    if (p) {
      ++st_.btb_hits[static_cast<std::size_t>(p->partition)];
      if (p->multi_hit) ++st_.multi_hits;
    } else {
      ++st_.btb_misses;
    }
  }

  // Predicted-taken terminator bookkeeping shared by both organizations.
  FtqEntry taken_entry(addr_t start, std::uint32_t len, addr_t term_pc,
                       const BtbPrediction& p) {
    addr_t target;
    if (p.target_from_ras) {
      const auto top = spec_ras_.pop();
      target = top ? *top : term_pc + 4;  // empty stack: mispredict and resteer
    } else {
      target = p.target;
    }
    if (is_call(p.kind)) spec_ras_.push(term_pc + 4);
    FtqEntry e;
    e.start = start;
    e.length = len;
    e.predicted_next = target;
    e.terminator = TerminatingBranch{term_pc, p.kind, target};
    return e;
  }

  void generate() {
    if (ftq_.full()) return;
    FtqEntry e;
    if (btb_.block_organized()) {
      const std::uint64_t prefix = (gen_pc_ - gen_block_start_) >> 2;
      if (prefix != 0) {
        // Resumed mid-block after a resteer: finish the window blind.
        const auto len = static_cast<std::uint32_t>(kBlockCap - prefix % kBlockCap);
        e.start = gen_pc_;
        e.length = len;
        e.predicted_next = gen_pc_ + 4ull * len;
        gen_block_start_ = e.predicted_next;
      } else {
        const auto p = btb_.predict(gen_pc_);
        note_lookup(p);
        if (!p) {
          e.start = gen_pc_;
          e.length = kBlockCap;
          e.predicted_next = gen_pc_ + 4 * kBlockCap;
          gen_block_start_ = e.predicted_next;
        } else {
          const auto len = std::clamp<std::uint32_t>(p->block_len, 1, kBlockCap);
          const addr_t term_pc = gen_pc_ + 4ull * (len - 1);
          const bool taken = is_always_taken(p->kind) ||
                             predict_taken(term_pc, gen_ahead_ + len - 1);
          if (taken) {
            e = taken_entry(gen_pc_, len, term_pc, *p);
          } else {
            e.start = gen_pc_;
            e.length = len;
            e.predicted_next = term_pc + 4;
          }
          gen_block_start_ = e.predicted_next;
        }
      }
    } else {
      addr_t pc = gen_pc_;
      std::uint32_t len = 0;
      for (std::uint32_t q = 0; q < cfg_.lookup_bandwidth; ++q) {
        const auto p = btb_.predict(pc);
        note_lookup(p);
        ++len;
        if (p) {
          const bool taken =
              is_always_taken(p->kind) || predict_taken(pc, gen_ahead_ + len - 1);
          if (taken) {
            e = taken_entry(gen_pc_, len, pc, *p);
            break;
          }
        }
        pc += 4;
      }
      if (!e.terminator) {
        e.start = gen_pc_;
        e.length = len;
        e.predicted_next = gen_pc_ + 4ull * len;
      }
    }
    gen_pc_ = e.predicted_next;
    gen_ahead_ += e.length;
    ftq_.push(e);
  }

  // ---- fetch engine ------------------------------------------------------

  void fetch() {
    if (now_ < stall_until_) {
      if (now_ < demand_stall_end_) ++st_.demand_stall_cycles;
      return;
    }
    std::uint32_t budget = cfg_.fetch_width;
    while (budget > 0 && !ftq_.empty()) {
      FtqEntry& e = ftq_.head();
      const addr_t pc = e.start + 4ull * e.consumed;
      const addr_t blk = block_addr(pc);

      ++st_.l1i_accesses;
      const auto touch = l1i_.touch_demand(blk);
      if (!touch.hit) {
        ++st_.l1i_misses;
        if (l1i_.is_in_flight(blk)) {
          ++st_.l1i_late_prefetch_hits;
          stall_until_ = l1i_.ready_at(blk);
        } else {
          l1i_.start_fill(blk, now_ + cfg_.miss_latency, false);
          stall_until_ = now_ + cfg_.miss_latency;
        }
        demand_stall_end_ = stall_until_;
        return;
      }
      if (touch.prefetched_line) ++st_.l1i_prefetch_hits;
      if (touch.first_use) ++st_.prefetches_useful;

      const TraceRecord* r = window_at(0);
      if (r == nullptr) {
        // Trace ended while speculative entries remained.
        ftq_.flush();
        return;
      }
      if (r->pc != pc)
        throw std::logic_error("simulator lost trace alignment");
      const TraceRecord rec = *r;

      // Commit.
      ++st_.instructions;
      ++committed_;
      window_.pop_front();
      --gen_ahead_;
      --budget;
      if (cfg_.direction == DirectionPolicy::Bimodal &&
          rec.kind == BranchKind::ConditionalDirect)
        bimodal_.update(pc, rec.taken);
      if (rec.taken && is_call(rec.kind)) arch_ras_.push(pc + 4);
      if (rec.taken && rec.kind == BranchKind::Return) arch_ras_.pop();

      const bool last_in_entry = e.consumed + 1 == e.length;
      const addr_t predicted_next = last_in_entry ? e.predicted_next : pc + 4;
      const addr_t actual_next = rec.taken ? rec.target : pc + 4;
      const auto terminator =
          last_in_entry ? e.terminator : std::optional<TerminatingBranch>{};
      const addr_t entry_start = e.start;

      // Architectural block boundary: branches reset it, long straight-line
      // runs advance it one window at a time.
      const addr_t block_key = fetch_block_start_;
      if (is_branch(rec.kind))
        fetch_block_start_ = actual_next;
      else if (((pc + 4 - fetch_block_start_) >> 2) == kBlockCap)
        fetch_block_start_ = pc + 4;

      ++e.consumed;
      if (last_in_entry) ftq_.retire_head();  // `e` is dead past this point

      if (actual_next != predicted_next) {
        resteer(rec, block_key, entry_start, terminator, actual_next);
        return;
      }
    }
  }

  void resteer(const TraceRecord& rec, addr_t block_key, addr_t entry_start,
               const std::optional<TerminatingBranch>& terminator,
               addr_t actual_next) {
    ++st_.resteers;
    ftq_.flush();
    gen_ahead_ = 0;
    gen_pc_ = actual_next;
    gen_block_start_ = fetch_block_start_;
    spec_ras_ = arch_ras_;  // recover the speculative stack from committed state
    stall_until_ = std::max(stall_until_, now_ + cfg_.resteer_penalty);

    if (rec.taken) {
      if (btb_.block_organized()) {
        const auto len = static_cast<std::uint8_t>(((rec.pc - block_key) >> 2) + 1);
        btb_.learn(block_key, rec.kind, rec.target, len);
      } else {
        btb_.learn(rec.pc, rec.kind, rec.target, 0);
      }
    } else if (rec.kind == BranchKind::NotABranch && terminator) {
      // The BTB predicted a taken branch at a non-branch pc: drop the liar.
      btb_.invalidate(btb_.block_organized() ? entry_start : rec.pc);
    }
    // Not-taken conditional predicted taken needs no structural fix: the
    // entry's data is right, only the direction was wrong.
  }

  // ---- prefetcher --------------------------------------------------------

  void prefetch_scan() {
    for (std::uint32_t k = 0; k < cfg_.prefetch_scan_rate; ++k) {
      const FtqEntry* e = ftq_.scan_next();
      if (e == nullptr) break;
      for (addr_t b = block_addr(e->start); b < e->end(); b += kCacheBlockBytes) {
        if (filter_.contains(b)) {
          ++st_.prefetches_filtered;
          continue;
        }
        if (l1i_.resident(b) || l1i_.is_in_flight(b)) continue;
        l1i_.start_fill(b, now_ + cfg_.miss_latency, true);
        ++st_.prefetches_issued;
        filter_.record(b);
      }
    }
  }

  // ---- state -------------------------------------------------------------

  const SimConfig& cfg_;
  BtbModel& btb_;
  const TraceSource& source_;
  SimStats st_;

  Ftq ftq_;
  ReturnAddressStack spec_ras_;  // updated by predictions
  ReturnAddressStack arch_ras_;  // updated by commits; resteers copy it over
  PrefetchFilter filter_;
  L1ICache l1i_;
  Bimodal bimodal_;

  std::deque<TraceRecord> window_;  // records at and past the commit point
  std::optional<TraceRecord> intake_prev_;
  bool source_done_ = false;
  std::uint64_t committed_ = 0;
  std::uint64_t gen_ahead_ = 0;  // instructions generated but not committed

  addr_t gen_pc_ = 0;
  addr_t gen_block_start_ = 0;
  addr_t fetch_block_start_ = 0;
  std::uint64_t now_ = 0;
  std::uint64_t stall_until_ = 0;
  std::uint64_t demand_stall_end_ = 0;
};

}  // namespace

std::unique_ptr<BtbModel> make_btb_model(const SimConfig& cfg) {
  switch (cfg.btb_mode) {
    case BtbMode::FdipBlock:
      return make_block_btb_model(cfg.baseline_entries, cfg.btb_unbounded);
    case BtbMode::MonolithicInstr:
      return make_monolithic_model(cfg.baseline_entries, cfg.tag_mode,
                                   cfg.btb_unbounded);
    case BtbMode::FdipxEnsemble:
      return make_ensemble_model(cfg.baseline_entries, cfg.tag_mode,
                                 cfg.btb_unbounded);
  }
  throw ConfigError("unknown btb_mode");
}

SimStats simulate(const TraceSource& source, const SimConfig& cfg, BtbModel& btb) {
  cfg.validate();
  Engine engine(cfg, btb, source);
  return engine.run();
}

SimStats simulate(const TraceSource& source, const SimConfig& cfg) {
  const auto btb = make_btb_model(cfg);
  return simulate(source, cfg, *btb);
}

SimStats simulate(std::span<const TraceRecord> trace, const SimConfig& cfg,
                  BtbModel& btb) {
  std::size_t i = 0;
  const TraceSource source = [&]() -> std::optional<TraceRecord> {
    if (i >= trace.size()) return std::nullopt;
    return trace[i++];
  };
  return simulate(source, cfg, btb);
}

SimStats simulate(std::span<const TraceRecord> trace, const SimConfig& cfg) {
  const auto btb = make_btb_model(cfg);
  return simulate(trace, cfg, *btb);
}

void prewarm_btb(BtbModel& btb, std::span<const TraceRecord> trace) {
  if (trace.empty()) return;
  addr_t block_start = trace.front().pc;
  for (const TraceRecord& r : trace) {
    if (r.taken && is_branch(r.kind)) {
      if (btb.block_organized()) {
        const auto len = static_cast<std::uint8_t>(((r.pc - block_start) >> 2) + 1);
        btb.learn(block_start, r.kind, r.target, len);
      } else {
        btb.learn(r.pc, r.kind, r.target, 0);
      }
    }
    if (is_branch(r.kind))
      block_start = r.taken ? r.target : r.pc + 4;
    else if (((r.pc + 4 - block_start) >> 2) == kBlockCap)
      block_start = r.pc + 4;
  }
}

}  // namespace fdipx
