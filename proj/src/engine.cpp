#include "ciao/engine.hpp"

#include <atomic>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace ciao {

namespace {

bool is_ciao(Policy p) {
  return p == Policy::CiaoT || p == Policy::CiaoP || p == Policy::CiaoC;
}

const char* action_name(SchedAction a) {
  switch (a) {
    case SchedAction::None: return "none";
    case SchedAction::Isolate: return "isolate";
    case SchedAction::Stall: return "stall";
    case SchedAction::Reactivate: return "reactivate";
    case SchedAction::Unredirect: return "unredirect";
  }
  return "?";
}

}  // namespace

double SimStats::l1d_hit_rate() const {
  uint64_t h = l1d_hits(), m = l1d_misses();
  return h + m ? double(h) / double(h + m) : 0.0;
}

double SimStats::smem_hit_rate() const {
  uint64_t h = smem_hits(), m = smem_misses();
  return h + m ? double(h) / double(h + m) : 0.0;
}

uint64_t SimStats::l1d_hits() const {
  uint64_t n = 0;
  for (const auto& s : l1d) n += s.hits;
  return n;
}

uint64_t SimStats::l1d_misses() const {
  uint64_t n = 0;
  for (const auto& s : l1d) n += s.misses;
  return n;
}

uint64_t SimStats::smem_hits() const {
  uint64_t n = 0;
  for (const auto& s : smem) n += s.hits;
  return n;
}

uint64_t SimStats::smem_misses() const {
  uint64_t n = 0;
  for (const auto& s : smem) n += s.misses;
  return n;
}

SimStats run(const Trace& trace, const SimConfig& cfg, const RunOptions& opts) {
  {
    auto errs = validate_config(cfg);
    if (!errs.empty()) {
      std::string msg = "invalid config:";
      for (const auto& e : errs) msg += " " + e + ";";
      throw std::invalid_argument(msg);
    }
  }

  // Per-warp program-order streams.
  std::vector<std::vector<const TraceRecord*>> stream(cfg.max_warps);
  for (const TraceRecord& r : trace) {
    if (r.warp >= cfg.max_warps)
      throw std::runtime_error("malformed trace: unknown warp id " + std::to_string(r.warp));
    stream[r.warp].push_back(&r);
  }

  Mshr mshr(cfg);
  L1dCache l1d(cfg, mshr);
  VtaDetector det(cfg);

  Smmt smmt(cfg.smem_rows_per_bank);
  if (cfg.cta_smem_rows > 0) smmt.reserve_cta(0, 0, cfg.cta_smem_rows);
  bool use_smem = cfg.scheduler == Policy::CiaoP || cfg.scheduler == Policy::CiaoC;
  TranslationUnit tu;
  if (use_smem) tu = reserve_cache_space(smmt, cfg);
  SmemCache smem(cfg, tu, mshr);

  SchedulerState sched(cfg, cfg.scheduler);
  uint32_t launched = 0;
  for (WarpId w = 0; w < cfg.max_warps; ++w) {
    if (!stream[w].empty()) {
      sched.warps()[w].launched = true;
      ++launched;
    }
  }
  det.set_active_warps(launched);

  SimStats stats;
  stats.max_warps = cfg.max_warps;
  stats.launched_warps = launched;
  stats.smem_cache_rows = tu.cache_rows;
  stats.smem_cta_rows = cfg.cta_smem_rows;

  Cycle now = 0;
  uint32_t finished = 0;
  std::vector<MshrEntry> ready;
  std::vector<EvictionEvent> evbuf;

  // Forward-progress guard: generous bound on the whole run.
  const uint64_t cycle_limit =
      uint64_t(trace.size() + 1) * (cfg.dram_latency_cycles + cfg.l2_hit_latency_cycles + 32) +
      10'000'000ull;

  auto log_epoch = [&](Cycle cyc, EpochKind kind, WarpId warp, double irs, SchedAction act,
                       WarpId target) {
    uint64_t len = kind == EpochKind::HighCutoff ? cfg.high_epoch_insts : cfg.low_epoch_insts;
    stats.epoch_log.push_back({cyc, kind, det.inst_total() / len, warp, irs, act, target});
  };

  while (finished < launched) {
    // Fills that matured this cycle.
    ready.clear();
    mshr.collect_ready(now, ready);
    // A fill makes its structure the block's single home: any copy in the
    // other structure is dropped (both are clean for global data; a dirty
    // local line in L1D is written back by the eviction path).
    for (const MshrEntry& e : ready) {
      if (e.destination == FillDestination::L1D) {
        l1d.install(e, now);
        if (use_smem) smem.drop_block(e.block);
      } else {
        evbuf.clear();
        smem.install(e, now, evbuf);
        for (const auto& ev : evbuf) det.record_eviction(ev);
        l1d.evict_to_response_queue(e.block * cfg.line_bytes);
      }
      for (WarpId w : e.waiters) sched.warps()[w].blocked = false;
    }

    // Retire warps whose stream is consumed and whose last fill arrived.
    for (auto& w : sched.warps()) {
      if (w.launched && !w.finished && !w.blocked && w.pc == stream[w.wid].size()) {
        sched.mark_finished(w.wid);
        ++finished;
        det.set_active_warps(launched - finished);
      }
    }
    if (finished == launched) break;

    std::optional<WarpId> sel = sched.select_warp(now);
    if (sel) {
      WarpId w = *sel;
      WarpState& ws = sched.warps()[w];
      const TraceRecord& rec = *stream[w][ws.pc];
      bool issued = true;

      if (rec.kind != TraceKind::Alu) {
        bool is_store = rec.kind == TraceKind::Store;
        bool to_smem = use_smem && ws.isolated_i && tu.has_capacity() &&
                       rec.space == MemSpace::Global;
        evbuf.clear();
        uint64_t block = block_index(rec.addr, cfg);
        if (to_smem) {
          SmemAccessOutcome out = smem.access(w, rec.addr, is_store, now, l1d, evbuf);
          switch (out) {
            case SmemAccessOutcome::Hit:
            case SmemAccessOutcome::Bypassed:
              ++ws.pc;
              break;
            case SmemAccessOutcome::MissIssued:
            case SmemAccessOutcome::MissMerged:
              det.check_vta(w, block);
              ++ws.pc;
              ws.blocked = true;
              break;
            case SmemAccessOutcome::MshrFull:
              issued = false;
              ++stats.mshr_full_stalls;
              break;
            case SmemAccessOutcome::ZeroCapacity:
              issued = false;  // unreachable: routing checks capacity
              break;
          }
        } else {
          AccessOutcome out = l1d.access(w, rec.addr, is_store, rec.space, now, evbuf);
          switch (out) {
            case AccessOutcome::Hit:
            case AccessOutcome::Bypassed:
              ++ws.pc;
              break;
            case AccessOutcome::MissIssued:
            case AccessOutcome::MissMerged:
              det.check_vta(w, block);
              ++ws.pc;
              ws.blocked = true;
              break;
            case AccessOutcome::MshrFull:
              issued = false;
              ++stats.mshr_full_stalls;
              break;
          }
        }
        for (const auto& ev : evbuf) det.record_eviction(ev);
      } else {
        ++ws.pc;
      }

      if (issued) {
        ++stats.instructions;
        det.on_instruction();
        if (opts.record_issue_trace) stats.issue_trace.push_back(w);

        bool low = det.epoch_tick(EpochKind::LowCutoff);
        bool high = det.epoch_tick(EpochKind::HighCutoff);
        if (is_ciao(cfg.scheduler)) {
          if (low) {
            // Stalled warps are examined first, most recently stalled first;
            // otherwise the issuing warp is the front of the warp list.
            WarpId front = sched.most_recent_stalled().value_or(w);
            double irs = 0.0;
            WarpId target = kNoWarp;
            SchedAction act = sched.ciao_low_epoch_step(front, det, &irs, &target);
            if (act == SchedAction::Unredirect) smem.invalidate_owned(target);
            log_epoch(now, EpochKind::LowCutoff, front, irs, act, target);
          }
          if (high) {
            WarpId j = det.most_interfering(w);
            double irs = 0.0;
            SchedAction act = sched.ciao_high_epoch_step(w, det, &irs);
            log_epoch(now, EpochKind::HighCutoff, w, irs, act,
                      act == SchedAction::None ? kNoWarp : j);
            det.snapshot_window();
          }
        } else if (cfg.scheduler == Policy::CcwsLite && low) {
          sched.ccws_lite_update(det);
        }
      }
    } else if (mshr.empty()) {
      // Nothing runnable and nothing in flight: only CIAO stalls or a stale
      // CCWS active set can hold the machine; drain them.
      if (is_ciao(cfg.scheduler) && sched.any_stalled()) {
        WarpId front = *sched.most_recent_stalled();
        double irs = 0.0;
        WarpId target = kNoWarp;
        SchedAction act = sched.ciao_low_epoch_step(front, det, &irs, &target);
        if (act == SchedAction::Unredirect) smem.invalidate_owned(target);
        log_epoch(now, EpochKind::LowCutoff, front, irs, act, target);
        if (act == SchedAction::None)
          throw std::logic_error("scheduler deadlock: stalled warp cannot drain");
      } else if (cfg.scheduler == Policy::CcwsLite) {
        sched.ccws_lite_update(det);
      } else {
        throw std::logic_error("engine idle with empty MSHR");
      }
    }

    if (opts.debug_coherence && use_smem && tu.has_capacity()) {
      auto smem_blocks = smem.resident_blocks();
      std::unordered_set<uint64_t> in_smem(smem_blocks.begin(), smem_blocks.end());
      for (uint64_t b : l1d.resident_blocks())
        if (in_smem.count(b)) {
          if (stats.coherence_violations == 0) {
            stats.first_violation_cycle = now;
            stats.first_violation_block = b;
          }
          ++stats.coherence_violations;
        }
    }

    if (now % opts.timeline_interval == 0) {
      TimelineSample s;
      s.cycle = now;
      for (const auto& w : sched.warps()) {
        if (!w.launched || w.finished) continue;
        if (!w.active_v)
          ++s.stalled;
        else if (w.isolated_i)
          ++s.isolated;
        else
          ++s.active;
      }
      stats.timeline.push_back(s);
    }

    ++now;
    if (now > cycle_limit) throw std::logic_error("engine watchdog: no forward progress");
  }

  stats.cycles = now;
  stats.ipc = stats.cycles ? double(stats.instructions) / double(stats.cycles) : 0.0;
  stats.l1d = l1d.warp_stats();
  stats.smem = smem.warp_stats();
  stats.vta_hits = det.vta_hit_counters();
  stats.interference_matrix = det.interference_matrix();
  stats.migrations = smem.migrations();
  stats.writebacks = l1d.writebacks();
  stats.write_queue_pushes = l1d.write_queue_pushes() + smem.write_queue_pushes();
  return stats;
}

std::vector<RunResult> run_matrix(const std::vector<RunSpec>& cells, unsigned max_threads) {
  std::vector<RunResult> results(cells.size());
  if (cells.empty()) return results;

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const RunSpec& cell = cells[i];
      RunResult& r = results[i];
      r.trace_name = cell.trace_name;
      r.policy = cell.cfg.scheduler;
      try {
        r.stats = run(*cell.trace, cell.cfg, cell.opts);
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };

  unsigned n = std::max(1u, std::min<unsigned>(max_threads, cells.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

void write_summary_csv(const std::vector<RunResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "policy,trace,cycles,instructions,ipc,l1d_hit_rate,smem_hit_rate\n";
  for (const auto& r : results) {
    if (!r.ok) continue;
    out << policy_name(r.policy) << ',' << r.trace_name << ',' << r.stats.cycles << ','
        << r.stats.instructions << ',' << r.stats.ipc << ',' << r.stats.l1d_hit_rate() << ','
        << r.stats.smem_hit_rate() << '\n';
  }
}

void write_interference_csv(const SimStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "victim,evictor,count\n";
  for (uint32_t v = 0; v < stats.max_warps; ++v)
    for (uint32_t e = 0; e < stats.max_warps; ++e) {
      uint64_t c = stats.interference_matrix[size_t(v) * stats.max_warps + e];
      if (c) out << v << ',' << e << ',' << c << '\n';
    }
}

void write_timeline_csv(const SimStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "cycle,active,isolated,stalled\n";
  for (const auto& s : stats.timeline)
    out << s.cycle << ',' << s.active << ',' << s.isolated << ',' << s.stalled << '\n';
}

void write_epochs_csv(const SimStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "cycle,kind,epoch,warp,irs,action,target\n";
  for (const auto& e : stats.epoch_log) {
    out << e.cycle << ',' << (e.kind == EpochKind::HighCutoff ? "high" : "low") << ','
        << e.epoch_index << ',' << e.warp << ',' << e.irs << ',' << action_name(e.action) << ',';
    if (e.target == kNoWarp)
      out << "-";
    else
      out << e.target;
    out << '\n';
  }
}

void write_warps_csv(const SimStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "warp,l1d_hits,l1d_misses,l1d_bypassed,l1d_evictions_caused,l1d_evictions_suffered,"
         "smem_hits,smem_misses,smem_bypassed,smem_evictions_caused,smem_evictions_suffered,"
         "vta_hits\n";
  for (uint32_t w = 0; w < stats.max_warps; ++w) {
    const auto& l = stats.l1d[w];
    const auto& s = stats.smem[w];
    if (l.hits + l.misses + l.bypassed + s.hits + s.misses + s.bypassed +
            stats.vta_hits[w] ==
        0)
      continue;
    out << w << ',' << l.hits << ',' << l.misses << ',' << l.bypassed << ','
        << l.evictions_caused << ',' << l.evictions_suffered << ',' << s.hits << ','
        << s.misses << ',' << s.bypassed << ',' << s.evictions_caused << ','
        << s.evictions_suffered << ',' << stats.vta_hits[w] << '\n';
  }
}

}  // namespace ciao
