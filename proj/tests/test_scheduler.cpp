#include <doctest.h>

#include "ciao/scheduler.hpp"

using namespace ciao;

namespace {

SchedulerState make_sched(const SimConfig& cfg, Policy p, uint32_t launched) {
  SchedulerState s(cfg, p);
  for (WarpId w = 0; w < launched; ++w) s.warps()[w].launched = true;
  return s;
}

// Puts the detector in a state where irs(victim) is `hits * active / insts`
// and most_interfering(victim) is `interferer`.
void prime_detector(VtaDetector& det, WarpId victim, WarpId interferer, uint64_t hits,
                    uint64_t insts, uint32_t active) {
  for (uint64_t i = 0; i < hits; ++i) {
    uint64_t block = 0xe000 + i;
    det.record_eviction({block, victim, interferer});
    det.check_vta(victim, block);
  }
  for (uint64_t i = 0; i < insts; ++i) det.on_instruction();
  det.set_active_warps(active);
}

}  // namespace

TEST_CASE("GTO picks the greedy warp, then the oldest ready one") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::Gto, 4);
  CHECK(*s.select_warp(0) == 0);  // all ready: lowest age
  CHECK(*s.select_warp(1) == 0);  // greedy stickiness
  s.warps()[0].blocked = true;
  CHECK(*s.select_warp(2) == 1);
  CHECK(*s.select_warp(3) == 1);
  s.warps()[0].blocked = false;
  CHECK(*s.select_warp(4) == 1);  // still greedy on 1
  s.warps()[1].blocked = true;
  CHECK(*s.select_warp(5) == 0);  // oldest ready again
  s.warps()[0].blocked = true;
  s.warps()[2].blocked = true;
  s.warps()[3].blocked = true;
  CHECK(!s.select_warp(6).has_value());
}

TEST_CASE("Best-SWL keeps only the first `limit` unfinished warps eligible") {
  SimConfig cfg = default_config();
  cfg.best_swl_limit = 2;
  auto s = make_sched(cfg, Policy::BestSwl, 4);
  // Only warps 0 and 1 while nothing finished.
  CHECK(*s.select_warp(0) == 0);
  s.warps()[0].blocked = true;
  CHECK(*s.select_warp(1) == 1);
  s.warps()[1].blocked = true;
  CHECK(!s.select_warp(2).has_value());  // 2 and 3 stay outside the window
  // Window slides once a member finishes.
  s.mark_finished(0);
  CHECK(*s.select_warp(3) == 2);
}

TEST_CASE("stalled warps are never selected until reactivated") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::CiaoT, 3);
  VtaDetector det(cfg);
  prime_detector(det, 0, 2, 100, 5000, 3);  // IRS_0 = 0.06, interferer W2
  double irs = 0.0;
  CHECK(s.ciao_high_epoch_step(0, det, &irs) == SchedAction::Stall);
  CHECK(irs == doctest::Approx(0.06));
  for (int i = 0; i < 5; ++i) CHECK(*s.select_warp(i) != 2);
  CHECK(s.most_recent_stalled() == WarpId(2));
}

TEST_CASE("high-epoch step isolates, then escalates to a stall (CIAO-C)") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::CiaoC, 3);
  VtaDetector det(cfg);
  prime_detector(det, 0, 1, 100, 5000, 3);

  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Isolate);
  CHECK(s.warps()[1].isolated_i);
  CHECK(s.warps()[1].active_v);
  CHECK(s.pair_list()[1].field0 == 0);

  // Still above cutoff at the next boundary: escalate.
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Stall);
  CHECK(!s.warps()[1].active_v);
  CHECK(s.pair_list()[1].field1 == 0);

  // A third trigger changes nothing (already stalled).
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::None);
}

TEST_CASE("below the cutoff or self-interference: no state change") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::CiaoC, 3);
  VtaDetector det(cfg);
  prime_detector(det, 0, 1, 10, 5000, 3);  // IRS_0 = 10*3/5000 = 0.006
  double irs = 0.0;
  CHECK(s.ciao_high_epoch_step(0, det, &irs) == SchedAction::None);
  CHECK(irs <= cfg.high_cutoff);

  // Self-interference sentinel: most_interfering(i) == i.
  auto s2 = make_sched(cfg, Policy::CiaoC, 3);
  VtaDetector det2(cfg);
  prime_detector(det2, 0, 0, 5000, 5000, 3);
  for (uint64_t i = 0; i < 100; ++i) {
    det2.record_eviction({0xa000 + i, 0, 0});  // self-evictions
    det2.check_vta(0, 0xa000 + i);
  }
  double irs2 = 0.0;
  CHECK(s2.ciao_high_epoch_step(0, det2, &irs2) == SchedAction::None);
  CHECK(irs2 > cfg.high_cutoff);
  CHECK(!s2.warps()[0].isolated_i);
}

TEST_CASE("CIAO-P isolates but never stalls") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::CiaoP, 3);
  VtaDetector det(cfg);
  prime_detector(det, 0, 1, 100, 5000, 3);
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Isolate);
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::None);
  CHECK(s.warps()[1].active_v);
}

TEST_CASE("CIAO-T stalls directly without the isolation step") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::CiaoT, 3);
  VtaDetector det(cfg);
  prime_detector(det, 0, 1, 100, 5000, 3);
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Stall);
  CHECK(!s.warps()[1].isolated_i);
  CHECK(!s.warps()[1].active_v);
}

TEST_CASE("low-epoch step reactivates once the trigger cools or finishes") {
  SimConfig cfg = default_config();

  SUBCASE("trigger IRS fell below low-cutoff") {
    auto s = make_sched(cfg, Policy::CiaoT, 4);
    VtaDetector det(cfg);
    prime_detector(det, 0, 1, 100, 5000, 4);  // W0 hot: stalls W1
    CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Stall);
    // W0's hit counter freezes while the denominator keeps growing.
    while (det.irs(0) > cfg.low_cutoff) det.on_instruction();
    double irs = 0.0;
    WarpId target = kNoWarp;
    CHECK(s.ciao_low_epoch_step(1, det, &irs, &target) == SchedAction::Reactivate);
    CHECK(target == 1);
    CHECK(s.warps()[1].active_v);
    CHECK(s.pair_list()[1].field1 == kNoWarp);
  }

  SUBCASE("trigger finished") {
    auto s = make_sched(cfg, Policy::CiaoT, 4);
    VtaDetector det(cfg);
    prime_detector(det, 0, 1, 100, 5000, 4);
    CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Stall);
    s.mark_finished(0);
    WarpId target = kNoWarp;
    CHECK(s.ciao_low_epoch_step(1, det, nullptr, &target) == SchedAction::Reactivate);
    CHECK(target == 1);
  }

  SUBCASE("trigger still hot: stay stalled") {
    auto s = make_sched(cfg, Policy::CiaoT, 4);
    VtaDetector det(cfg);
    prime_detector(det, 0, 1, 100, 5000, 4);
    CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Stall);
    CHECK(s.ciao_low_epoch_step(1, det, nullptr, nullptr) == SchedAction::None);
    CHECK(!s.warps()[1].active_v);
  }
}

TEST_CASE("low-epoch step redirects isolated warps back to L1D") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::CiaoC, 3);
  VtaDetector det(cfg);
  prime_detector(det, 0, 1, 100, 5000, 3);
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Isolate);

  // Trigger W0 still hot: stays isolated.
  CHECK(s.ciao_low_epoch_step(1, det, nullptr, nullptr) == SchedAction::None);
  CHECK(s.warps()[1].isolated_i);

  s.mark_finished(0);
  WarpId target = kNoWarp;
  CHECK(s.ciao_low_epoch_step(1, det, nullptr, &target) == SchedAction::Unredirect);
  CHECK(target == 1);
  CHECK(!s.warps()[1].isolated_i);
  CHECK(s.pair_list()[1].field0 == kNoWarp);
}

TEST_CASE("a reactivated CIAO-C warp stays isolated until separately unredirected") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::CiaoC, 3);
  VtaDetector det(cfg);
  prime_detector(det, 0, 1, 100, 5000, 3);
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Isolate);
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Stall);
  s.mark_finished(0);
  CHECK(s.ciao_low_epoch_step(1, det, nullptr, nullptr) == SchedAction::Reactivate);
  CHECK(s.warps()[1].isolated_i);  // back to the isolated state, not active
  CHECK(s.ciao_low_epoch_step(1, det, nullptr, nullptr) == SchedAction::Unredirect);
  CHECK(!s.warps()[1].isolated_i);
}

TEST_CASE("pair-list fields are preserved unless overwrite is configured") {
  SimConfig cfg = default_config();
  {
    auto s = make_sched(cfg, Policy::CiaoC, 4);
    VtaDetector det(cfg);
    prime_detector(det, 0, 1, 100, 5000, 4);
    prime_detector(det, 3, 1, 100, 1, 4);  // W3 also points at W1
    CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Isolate);
    CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Stall);
    CHECK(s.pair_list()[1].field1 == 0);
    CHECK(s.ciao_high_epoch_step(3, det, nullptr) == SchedAction::None);
    CHECK(s.pair_list()[1].field1 == 0);  // preserved
  }
  {
    SimConfig ow = cfg;
    ow.pair_overwrite = true;
    auto s = make_sched(ow, Policy::CiaoC, 4);
    VtaDetector det(ow);
    prime_detector(det, 0, 1, 100, 5000, 4);
    prime_detector(det, 3, 1, 100, 1, 4);
    CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Isolate);
    CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::Stall);
    CHECK(s.ciao_high_epoch_step(3, det, nullptr) == SchedAction::None);
    CHECK(s.pair_list()[1].field1 == 3);  // overwritten by the later trigger
  }
}

TEST_CASE("finished interferers are left alone") {
  SimConfig cfg = default_config();
  auto s = make_sched(cfg, Policy::CiaoC, 3);
  VtaDetector det(cfg);
  prime_detector(det, 0, 1, 100, 5000, 3);
  s.mark_finished(1);
  CHECK(s.ciao_high_epoch_step(0, det, nullptr) == SchedAction::None);
}

TEST_CASE("ccws-lite throttles low-score warps within the budget") {
  SimConfig cfg = default_config();

  SUBCASE("all scores zero: all warps stay active") {
    auto s = make_sched(cfg, Policy::CcwsLite, 8);
    VtaDetector det(cfg);
    s.ccws_lite_update(det);
    for (WarpId w = 0; w < 8; ++w) CHECK(s.ccws_active(w));
  }

  SUBCASE("a dominant warp throttles the zero-score ones first") {
    auto s = make_sched(cfg, Policy::CcwsLite, 4);
    VtaDetector det(cfg);
    for (int i = 0; i < 50; ++i) {
      det.record_eviction({uint64_t(0x500 + i), 0, 1});
      det.check_vta(0, 0x500 + i);
    }
    s.ccws_lite_update(det);
    CHECK(s.ccws_active(0));       // the locality holder keeps running
    CHECK(!s.ccws_active(3));      // zero-score warps go first
    int active = 0;
    for (WarpId w = 0; w < 4; ++w) active += s.ccws_active(w) ? 1 : 0;
    CHECK(active >= 1);
  }

  SUBCASE("scores decay and throttled warps resume") {
    auto s = make_sched(cfg, Policy::CcwsLite, 4);
    VtaDetector det(cfg);
    for (int i = 0; i < 50; ++i) {
      det.record_eviction({uint64_t(0x600 + i), 0, 1});
      det.check_vta(0, 0x600 + i);
    }
    s.ccws_lite_update(det);
    CHECK(!s.ccws_active(3));
    // Hit-free epochs: geometric decay (x1/2 each) reaches the zero snap.
    for (int e = 0; e < 60; ++e) s.ccws_lite_update(det);
    for (WarpId w = 0; w < 4; ++w) CHECK(s.ccws_active(w));
  }
}
