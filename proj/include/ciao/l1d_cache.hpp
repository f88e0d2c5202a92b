#ifndef CIAO_L1D_CACHE_HPP
#define CIAO_L1D_CACHE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ciao/types.hpp"

namespace ciao {

enum class AccessOutcome : uint8_t {
  Hit,
  MissIssued,  // new MSHR entry created, fill in flight
  MissMerged,  // joined an in-flight fill for the same block
  Bypassed,    // store miss, write no-allocate: forwarded to the write queue
  MshrFull,    // no MSHR entry (or no evictable way); caller stalls and retries
};

enum class FillDestination : uint8_t { L1D, Smem };

// A conflicting fill pushed out a valid line. victim_owner is the warp whose
// fill brought the evicted data, evictor the warp whose access displaced it.
struct EvictionEvent {
  uint64_t evicted_block = 0;  // block index of the evicted line
  WarpId victim_owner = kNoWarp;
  WarpId evictor = kNoWarp;
};

struct MshrEntry {
  uint64_t block = 0;  // block-aligned global address / line_bytes
  FillDestination destination = FillDestination::L1D;
  // L1D fill target.
  uint32_t set = 0;
  uint32_t way = 0;
  // Smem fill target; present iff destination == Smem.
  uint32_t smem_group = 0;
  uint32_t smem_row = 0;
  WarpId owner = kNoWarp;  // warp whose miss created the entry
  std::vector<WarpId> waiters;
  Cycle fill_ready_cycle = 0;
};

// Outstanding-miss tracker shared by the L1D and shared-memory caches, plus
// the single L2 memory port (FIFO, 2 cycles per request).
class Mshr {
 public:
  explicit Mshr(const SimConfig& cfg)
      : capacity_(cfg.mshr_entries),
        l2_hit_latency_(cfg.l2_hit_latency_cycles),
        dram_latency_(cfg.dram_latency_cycles),
        l2_miss_ratio_(cfg.l2_miss_ratio) {}

  MshrEntry* find(uint64_t block);
  bool full() const { return entries_.size() >= capacity_; }
  bool empty() const { return entries_.empty(); }
  size_t pending() const { return entries_.size(); }

  // Allocates an entry whose fill goes through the memory port.
  MshrEntry& issue(uint64_t block, FillDestination dest, WarpId owner, Cycle now);
  // Allocates an entry served from the response queue (L1D->smem migration).
  MshrEntry& issue_from_response_queue(uint64_t block, WarpId owner, Cycle now);

  // Moves entries with fill_ready_cycle <= now into `out`, in issue order.
  void collect_ready(Cycle now, std::vector<MshrEntry>& out);

  std::optional<Cycle> next_ready() const;

 private:
  size_t capacity_;
  uint32_t l2_hit_latency_;
  uint32_t dram_latency_;
  double l2_miss_ratio_;
  Cycle port_next_free_ = 0;
  std::vector<MshrEntry> entries_;  // issue order; <= capacity entries
};

struct CacheLine {
  bool valid = false;
  bool reserved = false;  // way held for an in-flight fill
  bool dirty = false;
  uint64_t tag = 0;  // full block index, exact matching
  WarpId owner = kNoWarp;
  uint64_t lru_stamp = 0;
};

struct WarpCacheStats {
  uint64_t hits = 0;
  uint64_t misses = 0;  // issued + merged
  uint64_t bypassed = 0;
  uint64_t evictions_caused = 0;
  uint64_t evictions_suffered = 0;
};

// XOR set-index hash: low log2(S) bits of the block index XORed with the
// next-higher log2(S) bits. With xor_set_hash off, plain modulo indexing.
uint32_t set_index(GlobalAddress addr, const SimConfig& cfg);

// Set-associative L1D with per-line owner WID, LRU replacement,
// write no-allocate (local write-back, global write-through).
class L1dCache {
 public:
  L1dCache(const SimConfig& cfg, Mshr& mshr);

  AccessOutcome access(WarpId warp, GlobalAddress addr, bool is_store, MemSpace space,
                       Cycle now, std::vector<EvictionEvent>& evictions);

  struct Probe {
    bool present = false;
    WarpId owner = kNoWarp;
  };
  // Non-mutating tag check (no LRU update); used by the migration path.
  Probe probe_tag(GlobalAddress addr) const;

  // Invalidates a present line so a pending smem fill can take the data from
  // the response queue. Returns false when the block is not present.
  bool evict_to_response_queue(GlobalAddress addr);

  // Installs a completed fill.
  void install(const MshrEntry& entry, Cycle now);

  const std::vector<WarpCacheStats>& warp_stats() const { return stats_; }
  uint64_t writebacks() const { return writebacks_; }
  uint64_t write_queue_pushes() const { return write_queue_pushes_; }

  // Valid (not reserved) blocks, for the coherence auditor and tests.
  std::vector<uint64_t> resident_blocks() const;

 private:
  CacheLine* lookup(uint64_t block, uint32_t set);
  const CacheLine* lookup(uint64_t block, uint32_t set) const;

  const SimConfig& cfg_;
  Mshr& mshr_;
  uint32_t sets_;
  std::vector<CacheLine> lines_;  // sets_ * ways, row-major by set
  uint64_t lru_counter_ = 0;
  std::vector<WarpCacheStats> stats_;
  uint64_t writebacks_ = 0;
  uint64_t write_queue_pushes_ = 0;
};

}  // namespace ciao

#endif  // CIAO_L1D_CACHE_HPP
