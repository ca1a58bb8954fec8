#include "fdipx/btb_model.hpp"

namespace fdipx {

const char* to_string(BtbMode m) {
  switch (m) {
    case BtbMode::FdipBlock: return "fdip-block";
    case BtbMode::MonolithicInstr: return "monolithic-instr";
    case BtbMode::FdipxEnsemble: return "fdipx";
  }
  return "?";
}

std::optional<BtbMode> btb_mode_from_string(std::string_view name) {
  if (name == "fdip-block") return BtbMode::FdipBlock;
  if (name == "monolithic-instr") return BtbMode::MonolithicInstr;
  if (name == "fdipx") return BtbMode::FdipxEnsemble;
  return std::nullopt;
}

namespace {

// Single set-associative table storing absolute targets; covers both the
// basic-block BTB and the monolithic instruction-granular table.
class TableModel final : public BtbModel {
 public:
  TableModel(const BtbGeometry& geom, bool block_org)
      : table_(geom), block_org_(block_org) {}

  bool block_organized() const override { return block_org_; }

  std::optional<BtbPrediction> predict(addr_t pc) override {
    BtbEntry* e = table_.find(pc);
    if (e == nullptr) return std::nullopt;
    table_.touch(*e);
    BtbPrediction p;
    p.kind = e->kind;
    p.block_len = e->block_len;
    if (e->kind == BranchKind::Return)
      p.target_from_ras = true;
    else
      p.target = e->payload << 2;
    return p;
  }

  void learn(addr_t pc, BranchKind kind, addr_t target,
             std::uint8_t block_len) override {
    table_.fill(pc, kind, false, word_index(target), block_len);
  }

  void invalidate(addr_t pc) override { table_.invalidate(pc); }

  StorageBreakdown storage() const override {
    return storage_bytes(table_.geometry());
  }

  std::uint64_t occupancy() const override { return table_.occupancy(); }

 private:
  SetAssocBtb table_;
  bool block_org_;
};

class EnsembleModel final : public BtbModel {
 public:
  explicit EnsembleModel(const EnsembleConfig& cfg) : btb_(cfg) {}

  bool block_organized() const override { return false; }

  std::optional<BtbPrediction> predict(addr_t pc) override {
    const auto hit = btb_.lookup(pc);
    if (!hit) return std::nullopt;
    BtbPrediction p;
    p.kind = hit->kind;
    p.target = hit->target;
    p.target_from_ras = hit->target_from_ras;
    p.partition = hit->partition;
    p.multi_hit = hit->multi_hit;
    return p;
  }

  void learn(addr_t pc, BranchKind kind, addr_t target, std::uint8_t) override {
    btb_.insert(pc, kind, target);
  }

  void invalidate(addr_t pc) override { btb_.invalidate(pc); }

  StorageBreakdown storage() const override { return storage_bytes(btb_.config()); }

  std::uint64_t occupancy() const override { return btb_.occupancy(); }

 private:
  EnsembleBtb btb_;
};

}  // namespace

std::unique_ptr<BtbModel> make_block_btb_model(std::uint64_t baseline_entries,
                                               bool unbounded) {
  BtbGeometry g = bb_btb_geometry(baseline_entries);
  if (unbounded) g.ways = 0;
  return std::make_unique<TableModel>(g, true);
}

std::unique_ptr<BtbModel> make_monolithic_model(std::uint64_t baseline_entries,
                                                TagMode tag_mode, bool unbounded) {
  BtbGeometry g = monolithic_instr_geometry(baseline_entries, tag_mode);
  if (unbounded) g.ways = 0;
  return std::make_unique<TableModel>(g, false);
}

std::unique_ptr<BtbModel> make_ensemble_model(std::uint64_t baseline_entries,
                                              TagMode tag_mode, bool unbounded) {
  EnsembleConfig cfg = unbounded ? unbounded_ensemble(tag_mode)
                                 : fdipx_sizing(baseline_entries, tag_mode);
  if (!unbounded) cfg.baseline_entries = baseline_entries;
  return std::make_unique<EnsembleModel>(cfg);
}

}  // namespace fdipx
