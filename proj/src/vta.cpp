#include "ciao/vta.hpp"

#include <cassert>

namespace ciao {

VtaDetector::VtaDetector(const SimConfig& cfg)
    : cfg_(cfg),
      sets_(cfg.vta_sets),
      interference_(cfg.max_warps),
      vta_hits_(cfg.max_warps, 0),
      matrix_(size_t(cfg.max_warps) * cfg.max_warps, 0),
      vta_hits_base_(cfg.max_warps, 0) {
  for (WarpId w = 0; w < cfg.max_warps; ++w) interference_[w].interferer = w;
}

void VtaDetector::record_eviction(const EvictionEvent& ev) {
  assert(ev.victim_owner != kNoWarp && ev.victim_owner < sets_.size());
  auto& set = sets_[ev.victim_owner];
  if (set.size() >= cfg_.vta_entries_per_warp) set.pop_front();
  set.push_back({ev.evicted_block, ev.evictor});
}

VtaCheckResult VtaDetector::check_vta(WarpId warp, uint64_t block) {
  auto& set = sets_[warp];
  for (auto it = set.begin(); it != set.end(); ++it) {
    if (it->block != block) continue;
    WarpId evictor = it->evictor;
    set.erase(it);  // a hit consumes the entry
    ++vta_hits_[warp];
    matrix_[size_t(warp) * cfg_.max_warps + evictor] += 1;
    update_interference(warp, evictor);
    return {true, evictor};
  }
  return {false, kNoWarp};
}

void VtaDetector::update_interference(WarpId victim, WarpId evictor) {
  InterferenceEntry& e = interference_[victim];
  if (e.interferer == evictor) {
    if (e.counter < 3) ++e.counter;
  } else if (e.counter == 0) {
    e.interferer = evictor;  // replaced only at 00
  } else {
    --e.counter;
  }
}

double VtaDetector::irs(WarpId warp) const {
  uint64_t inst = inst_total_ - inst_base_;
  uint64_t hits = vta_hits_[warp] - vta_hits_base_[warp];
  assert(inst > 0 && active_warps_ > 0);
  return double(hits * active_warps_) / double(inst);
}

bool VtaDetector::epoch_tick(EpochKind kind) const {
  uint64_t len =
      kind == EpochKind::HighCutoff ? cfg_.high_epoch_insts : cfg_.low_epoch_insts;
  return inst_total_ > 0 && inst_total_ % len == 0;
}

void VtaDetector::snapshot_window() {
  if (!cfg_.irs_windowed) return;
  vta_hits_base_ = vta_hits_;
  inst_base_ = inst_total_;
}

}  // namespace ciao
