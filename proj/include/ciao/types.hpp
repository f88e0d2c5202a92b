#ifndef CIAO_TYPES_HPP
#define CIAO_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ciao {

using WarpId = uint32_t;
using GlobalAddress = uint64_t;
using Cycle = uint64_t;

// Sentinel for "no warp" (empty pair-list field, invalid owner, ...).
inline constexpr WarpId kNoWarp = 0xffffffffu;

enum class MemSpace : uint8_t { Global, Local };
enum class TraceKind : uint8_t { Alu, Load, Store };

// One warp instruction event. ALU records carry no address; a Load/Store
// stands for one coalesced per-warp cache access.
struct TraceRecord {
  WarpId warp = 0;
  TraceKind kind = TraceKind::Alu;
  GlobalAddress addr = 0;
  MemSpace space = MemSpace::Global;

  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

enum class Policy : uint8_t { Gto, BestSwl, CcwsLite, CiaoT, CiaoP, CiaoC };

const char* policy_name(Policy p);
std::optional<Policy> parse_policy(const std::string& name);

struct SimConfig {
  // L1D cache geometry.
  uint64_t l1d_size_bytes = 16 * 1024;
  uint32_t l1d_ways = 4;
  uint32_t line_bytes = 128;

  // Shared memory: 32 banks of 8-byte words; one bank-row holds two
  // 128-byte blocks (one per 16-bank group).
  uint64_t smem_total_bytes = 48 * 1024;
  uint32_t smem_banks = 32;
  uint32_t smem_rows_per_bank = 192;
  uint32_t cta_smem_rows = 0;  // rows already reserved by the kernel's CTAs

  // Victim tag array.
  uint32_t vta_entries_per_warp = 8;
  uint32_t vta_sets = 48;

  // Interference thresholds and epoch lengths (in instructions).
  double high_cutoff = 0.01;
  double low_cutoff = 0.005;
  uint64_t high_epoch_insts = 5000;
  uint64_t low_epoch_insts = 100;

  // Fill timing.
  uint32_t l2_hit_latency_cycles = 120;
  uint32_t dram_latency_cycles = 220;
  double l2_miss_ratio = 0.0;  // fraction of fills served from DRAM

  uint32_t mshr_entries = 32;
  uint32_t max_warps = 48;

  Policy scheduler = Policy::Gto;
  std::optional<uint32_t> best_swl_limit;

  bool xor_set_hash = true;
  bool irs_windowed = false;   // IRS over per-high-epoch deltas instead of run totals
  bool pair_overwrite = false; // later triggers overwrite occupied pair-list fields

  uint64_t l1d_sets() const { return l1d_size_bytes / (uint64_t(l1d_ways) * line_bytes); }
};

// GTX480-like default profile: 16KB/4-way/128B L1D, 48KB shared memory,
// 8x48 FIFO VTA, cutoffs 0.01/0.005, epochs 5000/100, 48 warps.
SimConfig default_config();

// One message per violated constraint; empty means valid.
std::vector<std::string> validate_config(const SimConfig& cfg);

// Flat key=value config files mirroring the SimConfig field names.
SimConfig load_config(const std::string& path);
void save_config(const SimConfig& cfg, const std::string& path);

inline GlobalAddress block_align(GlobalAddress addr, const SimConfig& cfg) {
  return addr & ~GlobalAddress(cfg.line_bytes - 1);
}

inline uint64_t block_index(GlobalAddress addr, const SimConfig& cfg) {
  return addr / cfg.line_bytes;
}

}  // namespace ciao

#endif  // CIAO_TYPES_HPP
