#include "ciao/l1d_cache.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

namespace ciao {

namespace {

// splitmix64; picks which fills miss L2 when l2_miss_ratio > 0.
uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

uint32_t set_index(GlobalAddress addr, const SimConfig& cfg) {
  uint64_t block = block_index(addr, cfg);
  uint64_t sets = cfg.l1d_sets();
  unsigned log2s = std::countr_zero(sets);
  uint64_t low = block & (sets - 1);
  if (!cfg.xor_set_hash) return static_cast<uint32_t>(low);
  uint64_t high = (block >> log2s) & (sets - 1);
  return static_cast<uint32_t>(low ^ high);
}

MshrEntry* Mshr::find(uint64_t block) {
  for (auto& e : entries_)
    if (e.block == block) return &e;
  return nullptr;
}

MshrEntry& Mshr::issue(uint64_t block, FillDestination dest, WarpId owner, Cycle now) {
  assert(!full());
  Cycle port_ready = std::max(port_next_free_, now);
  port_next_free_ = port_ready + 2;
  bool dram = l2_miss_ratio_ > 0.0 &&
              double(mix64(block) % 10000) < l2_miss_ratio_ * 10000.0;
  MshrEntry e;
  e.block = block;
  e.destination = dest;
  e.owner = owner;
  e.waiters.push_back(owner);
  e.fill_ready_cycle = port_ready + 2 + (dram ? dram_latency_ : l2_hit_latency_);
  entries_.push_back(std::move(e));
  return entries_.back();
}

MshrEntry& Mshr::issue_from_response_queue(uint64_t block, WarpId owner, Cycle now) {
  assert(!full());
  MshrEntry e;
  e.block = block;
  e.destination = FillDestination::Smem;
  e.owner = owner;
  e.waiters.push_back(owner);
  e.fill_ready_cycle = now + 1;  // response-queue transfer, no L2 round-trip
  entries_.push_back(std::move(e));
  return entries_.back();
}

void Mshr::collect_ready(Cycle now, std::vector<MshrEntry>& out) {
  size_t kept = 0;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].fill_ready_cycle <= now) {
      out.push_back(std::move(entries_[i]));
    } else {
      if (kept != i) entries_[kept] = std::move(entries_[i]);
      ++kept;
    }
  }
  entries_.resize(kept);
}

std::optional<Cycle> Mshr::next_ready() const {
  std::optional<Cycle> best;
  for (const auto& e : entries_)
    if (!best || e.fill_ready_cycle < *best) best = e.fill_ready_cycle;
  return best;
}

L1dCache::L1dCache(const SimConfig& cfg, Mshr& mshr)
    : cfg_(cfg),
      mshr_(mshr),
      sets_(static_cast<uint32_t>(cfg.l1d_sets())),
      lines_(sets_ * cfg.l1d_ways),
      stats_(cfg.max_warps) {}

CacheLine* L1dCache::lookup(uint64_t block, uint32_t set) {
  CacheLine* base = &lines_[size_t(set) * cfg_.l1d_ways];
  for (uint32_t w = 0; w < cfg_.l1d_ways; ++w)
    if (base[w].valid && base[w].tag == block) return &base[w];
  return nullptr;
}

const CacheLine* L1dCache::lookup(uint64_t block, uint32_t set) const {
  return const_cast<L1dCache*>(this)->lookup(block, set);
}

AccessOutcome L1dCache::access(WarpId warp, GlobalAddress addr, bool is_store,
                               MemSpace space, Cycle now,
                               std::vector<EvictionEvent>& evictions) {
  uint64_t block = block_index(addr, cfg_);
  uint32_t set = set_index(addr, cfg_);

  if (CacheLine* line = lookup(block, set)) {
    line->lru_stamp = ++lru_counter_;
    if (is_store) {
      if (space == MemSpace::Local)
        line->dirty = true;  // local write-back
      else
        ++write_queue_pushes_;  // global write-through
    }
    ++stats_[warp].hits;
    return AccessOutcome::Hit;
  }

  if (is_store) {
    // Write no-allocate: the store goes straight to the write queue.
    ++write_queue_pushes_;
    ++stats_[warp].bypassed;
    return AccessOutcome::Bypassed;
  }

  if (MshrEntry* pending = mshr_.find(block)) {
    pending->waiters.push_back(warp);
    ++stats_[warp].misses;
    return AccessOutcome::MissMerged;
  }
  if (mshr_.full()) return AccessOutcome::MshrFull;

  // Reserve a way: free slots first, then LRU among unreserved lines.
  CacheLine* base = &lines_[size_t(set) * cfg_.l1d_ways];
  CacheLine* victim = nullptr;
  for (uint32_t w = 0; w < cfg_.l1d_ways; ++w) {
    CacheLine& l = base[w];
    if (l.reserved) continue;
    if (!l.valid) {
      victim = &l;
      break;
    }
    if (!victim || l.lru_stamp < victim->lru_stamp) victim = &l;
  }
  if (!victim) return AccessOutcome::MshrFull;  // every way pending a fill

  if (victim->valid) {
    evictions.push_back({victim->tag, victim->owner, warp});
    ++stats_[warp].evictions_caused;
    if (victim->owner < stats_.size()) ++stats_[victim->owner].evictions_suffered;
    if (victim->dirty) ++writebacks_;
  }
  victim->valid = false;
  victim->dirty = false;
  victim->reserved = true;

  MshrEntry& e = mshr_.issue(block, FillDestination::L1D, warp, now);
  e.set = set;
  e.way = static_cast<uint32_t>(victim - base);
  ++stats_[warp].misses;
  return AccessOutcome::MissIssued;
}

L1dCache::Probe L1dCache::probe_tag(GlobalAddress addr) const {
  uint64_t block = block_index(addr, cfg_);
  if (const CacheLine* line = lookup(block, set_index(addr, cfg_)))
    return {true, line->owner};
  return {};
}

bool L1dCache::evict_to_response_queue(GlobalAddress addr) {
  uint64_t block = block_index(addr, cfg_);
  CacheLine* line = lookup(block, set_index(addr, cfg_));
  if (!line) return false;
  if (line->dirty) ++writebacks_;
  line->valid = false;
  line->dirty = false;
  return true;
}

void L1dCache::install(const MshrEntry& entry, Cycle) {
  assert(entry.destination == FillDestination::L1D);
  CacheLine& line = lines_[size_t(entry.set) * cfg_.l1d_ways + entry.way];
  line.valid = true;
  line.reserved = false;
  line.dirty = false;
  line.tag = entry.block;
  line.owner = entry.owner;
  line.lru_stamp = ++lru_counter_;
}

std::vector<uint64_t> L1dCache::resident_blocks() const {
  std::vector<uint64_t> out;
  for (const auto& l : lines_)
    if (l.valid) out.push_back(l.tag);
  return out;
}

}  // namespace ciao
