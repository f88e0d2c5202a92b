#include "ciao/scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ciao {

SchedulerState::SchedulerState(const SimConfig& cfg, Policy policy)
    : cfg_(cfg),
      policy_(policy),
      warps_(cfg.max_warps),
      pair_list_(cfg.max_warps),
      ccws_score_(cfg.max_warps, 0.0),
      ccws_prev_hits_(cfg.max_warps, 0),
      ccws_active_(cfg.max_warps, true) {
  for (WarpId w = 0; w < cfg.max_warps; ++w) {
    warps_[w].wid = w;
    warps_[w].gto_age = w;
  }
}

std::optional<WarpId> SchedulerState::select_warp(Cycle) {
  // Static wavefront limiting: only the first `limit` unfinished warps (in
  // launch order) are eligible; the window slides as warps finish.
  uint32_t swl_cutoff_age = UINT32_MAX;
  if (policy_ == Policy::BestSwl) {
    uint32_t limit = cfg_.best_swl_limit.value_or(cfg_.max_warps);
    uint32_t in_window = 0;
    swl_cutoff_age = 0;
    for (const auto& w : warps_) {  // warps_ is launch-ordered
      if (!w.launched || w.finished) continue;
      swl_cutoff_age = w.gto_age;
      if (++in_window >= limit) break;
    }
  }

  auto eligible = [&](const WarpState& w) {
    if (!w.schedulable()) return false;
    if (policy_ == Policy::CcwsLite && !ccws_active_[w.wid]) return false;
    if (policy_ == Policy::BestSwl && w.gto_age > swl_cutoff_age) return false;
    return true;
  };

  // Greedy warp keeps issuing until it stalls on memory.
  if (greedy_ && eligible(warps_[*greedy_])) return greedy_;

  const WarpState* best = nullptr;
  for (const auto& w : warps_) {
    if (!eligible(w)) continue;
    if (!best || w.gto_age < best->gto_age) best = &w;
  }
  if (!best) return std::nullopt;
  greedy_ = best->wid;
  return greedy_;
}

void SchedulerState::write_pair_field(WarpId j, int field, WarpId trigger) {
  WarpId& slot = field == 0 ? pair_list_[j].field0 : pair_list_[j].field1;
  if (slot == kNoWarp || cfg_.pair_overwrite) slot = trigger;
}

void SchedulerState::set_isolated(WarpId j, WarpId trigger) {
  WarpState& w = warps_[j];
  if (!w.active_v || w.isolated_i)
    throw std::logic_error("illegal transition: isolate requires active (V=1, I=0)");
  if (policy_ != Policy::CiaoP && policy_ != Policy::CiaoC)
    throw std::logic_error("isolate is a CIAO-P/C transition");
  w.isolated_i = true;
  write_pair_field(j, 0, trigger);
}

void SchedulerState::set_stalled(WarpId j, WarpId trigger) {
  WarpState& w = warps_[j];
  if (!w.active_v) throw std::logic_error("illegal transition: stall requires V=1");
  if (policy_ == Policy::CiaoT) {
    if (w.isolated_i) throw std::logic_error("CIAO-T never isolates");
  } else if (policy_ == Policy::CiaoC) {
    if (!w.isolated_i)
      throw std::logic_error("illegal transition: CIAO-C stalls only isolated warps");
  } else {
    throw std::logic_error("stall is a CIAO-T/C transition");
  }
  w.active_v = false;
  stall_stack_.push_back(j);
  write_pair_field(j, 1, trigger);
}

void SchedulerState::reactivate(WarpId j) {
  WarpState& w = warps_[j];
  if (w.active_v) throw std::logic_error("illegal transition: reactivate requires V=0");
  w.active_v = true;
  pair_list_[j].field1 = kNoWarp;
  std::erase(stall_stack_, j);
}

void SchedulerState::unredirect(WarpId j) {
  WarpState& w = warps_[j];
  if (!w.active_v || !w.isolated_i)
    throw std::logic_error("illegal transition: unredirect requires isolated (V=1, I=1)");
  w.isolated_i = false;
  pair_list_[j].field0 = kNoWarp;
}

void SchedulerState::mark_finished(WarpId w) {
  warps_[w].finished = true;
  std::erase(stall_stack_, w);
  if (greedy_ && *greedy_ == w) greedy_.reset();
}

std::optional<WarpId> SchedulerState::most_recent_stalled() const {
  if (stall_stack_.empty()) return std::nullopt;
  return stall_stack_.back();
}

SchedAction SchedulerState::ciao_high_epoch_step(WarpId i, const VtaDetector& det,
                                                 double* irs_out) {
  assert(warps_[i].active_v);
  double irs_i = det.irs(i);
  if (irs_out) *irs_out = irs_i;
  if (!(irs_i > cfg_.high_cutoff)) return SchedAction::None;

  WarpId j = det.most_interfering(i);
  if (j == i) return SchedAction::None;  // sentinel / self-interference
  if (j >= warps_.size() || !warps_[j].launched || warps_[j].finished)
    return SchedAction::None;

  WarpState& target = warps_[j];
  switch (policy_) {
    case Policy::CiaoT:
      if (target.active_v) {
        set_stalled(j, i);
        return SchedAction::Stall;
      }
      write_pair_field(j, 1, i);
      return SchedAction::None;
    case Policy::CiaoP:
      if (!target.isolated_i) {
        set_isolated(j, i);
        return SchedAction::Isolate;
      }
      return SchedAction::None;
    case Policy::CiaoC:
      if (target.isolated_i) {
        if (target.active_v) {
          set_stalled(j, i);
          return SchedAction::Stall;
        }
        write_pair_field(j, 1, i);
        return SchedAction::None;
      }
      set_isolated(j, i);
      return SchedAction::Isolate;
    default:
      return SchedAction::None;
  }
}

SchedAction SchedulerState::ciao_low_epoch_step(WarpId i, const VtaDetector& det,
                                                double* irs_out, WarpId* target_out) {
  if (target_out) *target_out = kNoWarp;
  WarpState& w = warps_[i];

  auto trigger_holds = [&](WarpId k, double* irs) {
    // The action is kept only while the triggering warp still runs with an
    // IRS above low-cutoff.
    if (k == kNoWarp || k >= warps_.size()) return false;
    if (!warps_[k].launched || warps_[k].finished) return false;
    if (det.inst_total() == 0 || det.active_warps() == 0) return false;
    double v = det.irs(k);
    if (irs) *irs = v;
    return v > cfg_.low_cutoff;
  };

  if (!w.finished && !w.active_v) {
    if (trigger_holds(pair_list_[i].field1, irs_out)) return SchedAction::None;
    reactivate(i);
    if (target_out) *target_out = i;
    return SchedAction::Reactivate;
  }
  if (!w.finished && w.isolated_i) {
    if (trigger_holds(pair_list_[i].field0, irs_out)) return SchedAction::None;
    unredirect(i);
    if (target_out) *target_out = i;
    return SchedAction::Unredirect;
  }
  if (irs_out && det.inst_total() > 0 && det.active_warps() > 0) *irs_out = det.irs(i);
  return SchedAction::None;
}

void SchedulerState::ccws_lite_update(const VtaDetector& det) {
  double total = 0.0;
  std::vector<WarpId> unfinished;
  for (auto& w : warps_) {
    if (!w.launched) continue;
    uint64_t hits = det.vta_hits(w.wid);
    uint64_t delta = hits - ccws_prev_hits_[w.wid];
    ccws_prev_hits_[w.wid] = hits;
    ccws_score_[w.wid] = ccws_score_[w.wid] * 0.5 + double(delta);
    if (ccws_score_[w.wid] < 1e-6) ccws_score_[w.wid] = 0.0;  // decayed out
    if (!w.finished) {
      total += ccws_score_[w.wid];
      unfinished.push_back(w.wid);
    }
    ccws_active_[w.wid] = true;
  }

  // Throttle from the lowest score up while the excluded score mass stays
  // below the budget; at least one warp always stays active.
  double budget = kCcwsExcludeBudget * total;
  std::sort(unfinished.begin(), unfinished.end(), [&](WarpId a, WarpId b) {
    if (ccws_score_[a] != ccws_score_[b]) return ccws_score_[a] < ccws_score_[b];
    return warps_[a].gto_age > warps_[b].gto_age;
  });
  double excluded = 0.0;
  size_t active_left = unfinished.size();
  for (WarpId w : unfinished) {
    if (active_left <= 1) break;
    if (!(excluded + ccws_score_[w] < budget)) break;
    ccws_active_[w] = false;
    excluded += ccws_score_[w];
    --active_left;
  }
}

}  // namespace ciao
