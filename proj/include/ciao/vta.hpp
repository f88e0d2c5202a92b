#ifndef CIAO_VTA_HPP
#define CIAO_VTA_HPP

#include <cstdint>
#include <deque>
#include <vector>

#include "ciao/l1d_cache.hpp"
#include "ciao/types.hpp"

namespace ciao {

// Per-warp entry of the interference list: the most recently and frequently
// interfering warp, guarded by a 2-bit saturating counter. The interferer is
// replaced only when a foreign event arrives while the counter is at 00.
struct InterferenceEntry {
  WarpId interferer = kNoWarp;  // initialised to self (inert sentinel)
  uint8_t counter = 0;          // 0..3
};

struct VtaCheckResult {
  bool hit = false;
  WarpId evictor = kNoWarp;
};

enum class EpochKind : uint8_t { HighCutoff, LowCutoff };

// Victim tag array + per-warp VTA-hit counters + interference list + IRS.
// One FIFO set per warp, indexed by the warp that owned the evicted data.
// Shared by the L1D and shared-memory caches.
class VtaDetector {
 public:
  explicit VtaDetector(const SimConfig& cfg);

  // Pushes {evicted block, evictor} into the victim's set (FIFO displacement).
  void record_eviction(const EvictionEvent& ev);

  // Called on every load miss. A hit consumes the matched entry, bumps the
  // warp's VTA-hit counter, and updates the interference list.
  VtaCheckResult check_vta(WarpId warp, uint64_t block);

  void update_interference(WarpId victim, WarpId evictor);

  // Eq.: vta_hits[warp] / (inst_total / active_warps). Requires inst_total > 0.
  double irs(WarpId warp) const;

  // One tick per executed instruction (engine calls on_instruction once);
  // epoch_tick reports whether the boundary for `kind` was just reached.
  void on_instruction() { ++inst_total_; }
  bool epoch_tick(EpochKind kind) const;

  WarpId most_interfering(WarpId warp) const { return interference_[warp].interferer; }

  void set_active_warps(uint32_t n) { active_warps_ = n; }
  uint32_t active_warps() const { return active_warps_; }
  uint64_t inst_total() const { return inst_total_; }
  uint64_t vta_hits(WarpId warp) const { return vta_hits_[warp]; }
  const std::vector<uint64_t>& vta_hit_counters() const { return vta_hits_; }

  // Snapshot hook for windowed IRS (taken at high-cutoff boundaries).
  void snapshot_window();

  // Cumulative (victim, evictor) VTA-hit counts, row-major max_warps^2.
  const std::vector<uint64_t>& interference_matrix() const { return matrix_; }

 private:
  struct VtaRecord {
    uint64_t block;
    WarpId evictor;
  };

  const SimConfig& cfg_;
  std::vector<std::deque<VtaRecord>> sets_;
  std::vector<InterferenceEntry> interference_;
  std::vector<uint64_t> vta_hits_;
  std::vector<uint64_t> matrix_;
  uint64_t inst_total_ = 0;
  uint32_t active_warps_ = 0;
  // Windowed-IRS baselines (zero when irs_windowed is off).
  std::vector<uint64_t> vta_hits_base_;
  uint64_t inst_base_ = 0;
};

}  // namespace ciao

#endif  // CIAO_VTA_HPP
