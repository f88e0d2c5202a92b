#ifndef CIAO_SCHEDULER_HPP
#define CIAO_SCHEDULER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ciao/types.hpp"
#include "ciao/vta.hpp"

namespace ciao {

// Warp scheduling states per V/I flags: active (V=1,I=0), isolated (V=1,I=1),
// stalled (V=0). V is changed only by the CIAO state machine; blocking on an
// outstanding fill is a separate, microarchitectural condition.
struct WarpState {
  WarpId wid = 0;
  bool launched = false;
  bool active_v = true;     // V flag
  bool isolated_i = false;  // I flag
  bool finished = false;
  bool blocked = false;     // waiting on an MSHR fill
  uint32_t gto_age = 0;     // launch-order stamp
  size_t pc = 0;            // trace cursor

  bool schedulable() const { return launched && !finished && active_v && !blocked; }
};

// Which interfered warp triggered the redirection (field0) or the stall
// (field1) of this warp; kNoWarp when empty.
struct PairEntry {
  WarpId field0 = kNoWarp;
  WarpId field1 = kNoWarp;
};

enum class SchedAction : uint8_t { None, Isolate, Stall, Reactivate, Unredirect };

struct EpochEvent {
  Cycle cycle = 0;
  EpochKind kind = EpochKind::LowCutoff;
  uint64_t epoch_index = 0;
  WarpId warp = kNoWarp;    // examined warp
  double irs = 0.0;         // IRS value the decision was based on
  SchedAction action = SchedAction::None;
  WarpId target = kNoWarp;  // warp acted upon
};

class SchedulerState {
 public:
  SchedulerState(const SimConfig& cfg, Policy policy);

  std::vector<WarpState>& warps() { return warps_; }
  const std::vector<WarpState>& warps() const { return warps_; }
  Policy policy() const { return policy_; }

  // Greedy-then-oldest base order; Best-SWL restricts to the first `limit`
  // unfinished warps, CCWS-lite to its active set. Returns nothing when every
  // warp is blocked, stalled, or throttled.
  std::optional<WarpId> select_warp(Cycle now);

  // Algorithm step at a high-cutoff boundary for examined warp i (V=1):
  // IRS_i above high-cutoff isolates the most interfering warp, or stalls it
  // if it is already isolated. CIAO-T stalls directly; CIAO-P never stalls.
  SchedAction ciao_high_epoch_step(WarpId i, const VtaDetector& det, double* irs_out);

  // Algorithm step at a low-cutoff boundary for examined warp i: a stalled
  // warp is reactivated, else an isolated warp is redirected back to L1D,
  // once the triggering warp's IRS fell below low-cutoff or it finished.
  SchedAction ciao_low_epoch_step(WarpId i, const VtaDetector& det, double* irs_out,
                                  WarpId* target_out);

  // CCWS-lite rescoring at a low-cutoff boundary: exponentially decayed
  // VTA-hit scores; warps carrying the lowest score mass are throttled while
  // the excluded mass stays under a fixed fraction of the total.
  void ccws_lite_update(const VtaDetector& det);

  // Most recently stalled warp, if any (reverse-order reactivation).
  std::optional<WarpId> most_recent_stalled() const;
  bool any_stalled() const { return !stall_stack_.empty(); }

  void mark_finished(WarpId w);

  const std::vector<PairEntry>& pair_list() const { return pair_list_; }
  bool ccws_active(WarpId w) const { return ccws_active_[w]; }

 private:
  void set_isolated(WarpId j, WarpId trigger);
  void set_stalled(WarpId j, WarpId trigger);
  void reactivate(WarpId j);
  void unredirect(WarpId j);
  void write_pair_field(WarpId j, int field, WarpId trigger);

  const SimConfig& cfg_;
  Policy policy_;
  std::vector<WarpState> warps_;
  std::vector<PairEntry> pair_list_;
  std::vector<WarpId> stall_stack_;  // stall order, most recent last
  std::optional<WarpId> greedy_;

  // CCWS-lite scoring.
  std::vector<double> ccws_score_;
  std::vector<uint64_t> ccws_prev_hits_;
  std::vector<bool> ccws_active_;
  static constexpr double kCcwsExcludeBudget = 0.25;
};

}  // namespace ciao

#endif  // CIAO_SCHEDULER_HPP
