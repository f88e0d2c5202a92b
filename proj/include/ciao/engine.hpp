#ifndef CIAO_ENGINE_HPP
#define CIAO_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ciao/l1d_cache.hpp"
#include "ciao/scheduler.hpp"
#include "ciao/smem_cache.hpp"
#include "ciao/types.hpp"
#include "ciao/vta.hpp"

namespace ciao {

struct TimelineSample {
  Cycle cycle = 0;
  uint32_t active = 0;
  uint32_t isolated = 0;
  uint32_t stalled = 0;
};

struct SimStats {
  uint64_t cycles = 0;
  uint64_t instructions = 0;
  double ipc = 0.0;

  std::vector<WarpCacheStats> l1d;   // per warp
  std::vector<WarpCacheStats> smem;  // per warp
  std::vector<uint64_t> vta_hits;
  std::vector<uint64_t> interference_matrix;  // row-major max_warps^2
  uint32_t max_warps = 0;
  uint32_t launched_warps = 0;

  std::vector<TimelineSample> timeline;
  std::vector<EpochEvent> epoch_log;

  uint64_t migrations = 0;
  uint64_t writebacks = 0;
  uint64_t first_violation_cycle = 0;
  uint64_t first_violation_block = 0;
  uint64_t write_queue_pushes = 0;
  uint64_t mshr_full_stalls = 0;
  uint64_t coherence_violations = 0;

  // Cache rows carved out of shared memory vs rows held by CTAs.
  uint32_t smem_cache_rows = 0;
  uint32_t smem_cta_rows = 0;

  // Issue order (warp per issued instruction); filled when requested.
  std::vector<WarpId> issue_trace;

  double l1d_hit_rate() const;
  double smem_hit_rate() const;
  uint64_t l1d_hits() const;
  uint64_t l1d_misses() const;
  uint64_t smem_hits() const;
  uint64_t smem_misses() const;
};

struct RunOptions {
  bool debug_coherence = false;   // per-cycle L1D/smem exclusivity auditor
  bool record_issue_trace = false;
  Cycle timeline_interval = 1000;
};

// Runs one trace to completion: every cycle services due fills, lets the
// selected warp issue its next record (memory requests routed to L1D or the
// shared-memory cache by the I flag), and steps the epoch machinery.
// Deterministic: identical (trace, cfg, options) gives identical SimStats.
SimStats run(const Trace& trace, const SimConfig& cfg, const RunOptions& opts = {});

struct RunSpec {
  const Trace* trace = nullptr;
  std::string trace_name;
  SimConfig cfg;
  RunOptions opts;
};

struct RunResult {
  bool ok = false;
  std::string error;
  std::string trace_name;
  Policy policy = Policy::Gto;
  SimStats stats;
};

// Independent cells, optionally in parallel; results keep cell order and
// nothing mutable is shared between cells.
std::vector<RunResult> run_matrix(const std::vector<RunSpec>& cells,
                                  unsigned max_threads = 1);

// CSV emission (engine external interfaces).
void write_summary_csv(const std::vector<RunResult>& results, const std::string& path);
void write_interference_csv(const SimStats& stats, const std::string& path);
void write_timeline_csv(const SimStats& stats, const std::string& path);
void write_epochs_csv(const SimStats& stats, const std::string& path);
void write_warps_csv(const SimStats& stats, const std::string& path);

}  // namespace ciao

#endif  // CIAO_ENGINE_HPP
