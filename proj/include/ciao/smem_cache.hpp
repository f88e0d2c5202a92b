#ifndef CIAO_SMEM_CACHE_HPP
#define CIAO_SMEM_CACHE_HPP

#include <cstdint>
#include <vector>

#include "ciao/l1d_cache.hpp"
#include "ciao/types.hpp"

namespace ciao {

// Shared-memory geometry: 32 banks of 8-byte words, split into two 16-bank
// groups. One bank-row holds one 128-byte block per group; a "row" below is
// always a bank-row index (0..smem_rows_per_bank-1).

struct SmmtEntry {
  enum class Owner : uint8_t { Cta, CiaoCache };
  Owner owner = Owner::Cta;
  uint32_t cta_id = 0;
  uint32_t base_row = 0;
  uint32_t size_rows = 0;
};

// Non-overlapping row reservations; their union never exceeds the row count.
class Smmt {
 public:
  explicit Smmt(uint32_t total_rows) : total_rows_(total_rows) {}

  void reserve_cta(uint32_t cta_id, uint32_t base_row, uint32_t size_rows);
  void reserve_ciao(uint32_t base_row, uint32_t size_rows);

  const std::vector<SmmtEntry>& entries() const { return entries_; }
  uint32_t total_rows() const { return total_rows_; }

  // Largest contiguous run of unreserved rows, as (base, size).
  std::pair<uint32_t, uint32_t> largest_free_range() const;
  bool row_is_cta_owned(uint32_t row) const;

 private:
  void check_overlap(uint32_t base_row, uint32_t size_rows) const;

  uint32_t total_rows_;
  std::vector<SmmtEntry> entries_;
};

// Decomposed shared-memory data-block address, LSB to MSB:
// byte offset (F:3), bank-in-group (B:4), bank group (G:1), row (R:8).
struct SmemLocation {
  uint8_t byte_offset = 0;  // F
  uint8_t bank = 0;         // B
  uint8_t group = 0;        // G
  uint8_t row = 0;          // R (absolute, offset applied)
};

uint16_t pack_location(const SmemLocation& loc);
SmemLocation unpack_location(uint16_t bits);

// Stored tag: 25 address-remainder bits + 6-bit WID + valid, two per 64-bit
// bank word. For 32-bit addresses tag_bits is exactly the block index
// (16 high address bits ++ 9-bit block-index component).
struct SmemTag {
  bool valid = false;
  WarpId wid = kNoWarp;
  uint64_t tag_bits = 0;
};

struct Translation {
  SmemLocation data;
  SmemLocation tag_loc;
  uint8_t tag_pos = 0;       // position within the 32-tag row: (bank<<1)|half
  uint64_t tag_expect = 0;   // full block index (25 bits for 32-bit addresses)
  uint32_t local_row = 0;    // R before adding data_offset, after the fold
};

// Registers of the address translation unit in front of shared memory.
struct TranslationUnit {
  uint8_t cta_mask = 0;      // row-usage summary, one bit per 32-row chunk
  uint32_t data_offset = 0;  // first data row
  uint32_t tag_offset = 0;   // first tag row
  uint32_t cache_rows = 0;   // data rows per group; 0 disables the cache

  bool has_capacity() const { return cache_rows > 0; }
  Translation translate(GlobalAddress addr) const;
};

// Carves the largest free SMMT range into a data region (one block per group
// per row) and a tag region (one tag row covers 32 data rows per group), and
// registers the CiaoCache reservation. Zero rows when nothing usable is free.
TranslationUnit reserve_cache_space(Smmt& smmt, const SimConfig& cfg);

enum class SmemAccessOutcome : uint8_t {
  Hit,
  MissIssued,
  MissMerged,
  Bypassed,
  MshrFull,
  ZeroCapacity,  // unit has no rows; caller must route to L1D
};

// Unused shared memory operated as a direct-mapped cache over (G, R).
// Shares the MSHR and the L2 datapath with the L1D cache; fills of blocks
// still resident in L1D migrate through the response queue instead.
class SmemCache {
 public:
  SmemCache(const SimConfig& cfg, const TranslationUnit& tu, Mshr& mshr);

  SmemAccessOutcome access(WarpId warp, GlobalAddress addr, bool is_store, Cycle now,
                           L1dCache& l1d, std::vector<EvictionEvent>& evictions);

  // Installs a completed fill; a conflicting resident is evicted.
  void install(const MshrEntry& entry, Cycle now, std::vector<EvictionEvent>& evictions);

  // Drops every (clean, write-through) block the warp brought in; called when
  // its requests are redirected back to L1D so no stale copy can later
  // coexist with a fresh L1D fill.
  void invalidate_owned(WarpId warp);

  // Drops one resident block if present (exclusivity when an L1D fill lands).
  void drop_block(uint64_t block);

  const std::vector<WarpCacheStats>& warp_stats() const { return stats_; }
  uint64_t migrations() const { return migrations_; }
  uint64_t write_queue_pushes() const { return write_queue_pushes_; }
  const TranslationUnit& unit() const { return tu_; }

  std::vector<uint64_t> resident_blocks() const;

 private:
  SmemTag& slot(uint8_t group, uint32_t local_row) {
    return tags_[size_t(group) * tu_.cache_rows + local_row];
  }

  const SimConfig& cfg_;
  TranslationUnit tu_;
  Mshr& mshr_;
  std::vector<SmemTag> tags_;  // 2 * cache_rows, [group][local_row]
  std::vector<WarpCacheStats> stats_;
  uint64_t migrations_ = 0;
  uint64_t write_queue_pushes_ = 0;
};

}  // namespace ciao

#endif  // CIAO_SMEM_CACHE_HPP
