#include "ciao/smem_cache.hpp"

#include <cassert>
#include <stdexcept>

namespace ciao {

void Smmt::check_overlap(uint32_t base_row, uint32_t size_rows) const {
  if (uint64_t(base_row) + size_rows > total_rows_)
    throw std::invalid_argument("SMMT reservation exceeds shared-memory rows");
  for (const auto& e : entries_) {
    bool disjoint = base_row >= e.base_row + e.size_rows || e.base_row >= base_row + size_rows;
    if (!disjoint && size_rows > 0 && e.size_rows > 0)
      throw std::invalid_argument("SMMT reservations overlap");
  }
}

void Smmt::reserve_cta(uint32_t cta_id, uint32_t base_row, uint32_t size_rows) {
  check_overlap(base_row, size_rows);
  entries_.push_back({SmmtEntry::Owner::Cta, cta_id, base_row, size_rows});
}

void Smmt::reserve_ciao(uint32_t base_row, uint32_t size_rows) {
  check_overlap(base_row, size_rows);
  for (const auto& e : entries_)
    if (e.owner == SmmtEntry::Owner::CiaoCache)
      throw std::invalid_argument("SMMT already holds a CiaoCache reservation");
  entries_.push_back({SmmtEntry::Owner::CiaoCache, 0, base_row, size_rows});
}

std::pair<uint32_t, uint32_t> Smmt::largest_free_range() const {
  std::vector<bool> used(total_rows_, false);
  for (const auto& e : entries_)
    for (uint32_t r = e.base_row; r < e.base_row + e.size_rows; ++r) used[r] = true;
  uint32_t best_base = 0, best_len = 0, base = 0, len = 0;
  for (uint32_t r = 0; r <= total_rows_; ++r) {
    if (r < total_rows_ && !used[r]) {
      if (len == 0) base = r;
      ++len;
    } else {
      if (len > best_len) {
        best_base = base;
        best_len = len;
      }
      len = 0;
    }
  }
  return {best_base, best_len};
}

bool Smmt::row_is_cta_owned(uint32_t row) const {
  for (const auto& e : entries_)
    if (e.owner == SmmtEntry::Owner::Cta && row >= e.base_row && row < e.base_row + e.size_rows)
      return true;
  return false;
}

uint16_t pack_location(const SmemLocation& loc) {
  return uint16_t(loc.byte_offset & 0x7) | uint16_t((loc.bank & 0xf) << 3) |
         uint16_t((loc.group & 0x1) << 7) | uint16_t(loc.row << 8);
}

SmemLocation unpack_location(uint16_t bits) {
  SmemLocation loc;
  loc.byte_offset = bits & 0x7;
  loc.bank = (bits >> 3) & 0xf;
  loc.group = (bits >> 7) & 0x1;
  loc.row = (bits >> 8) & 0xff;
  return loc;
}

Translation TranslationUnit::translate(GlobalAddress addr) const {
  assert(cache_rows > 0);
  Translation tr;
  tr.data.byte_offset = addr & 0x7;                       // F
  tr.data.bank = (addr >> 3) & 0xf;                       // B
  tr.data.group = (addr >> 7) & 0x1;                      // G
  uint32_t raw_row = (addr >> 8) & 0xff;                  // R source bits
  tr.local_row = raw_row % cache_rows;                    // fold; quotient lives in the tag
  tr.data.row = uint8_t(tr.local_row + data_offset);

  // 32 tags per row and group; position = (bank << 1) | half, half as LSB.
  tr.tag_pos = uint8_t(tr.local_row & 0x1f);
  tr.tag_loc.group = tr.data.group ^ 1;  // opposite bank group, no conflicts
  tr.tag_loc.bank = tr.tag_pos >> 1;
  tr.tag_loc.byte_offset = (tr.tag_pos & 1) ? 4 : 0;
  tr.tag_loc.row = uint8_t(tag_offset + (tr.local_row >> 5));

  // High address bits ++ 9-bit block-index component == the block index.
  tr.tag_expect = addr >> 7;
  return tr;
}

TranslationUnit reserve_cache_space(Smmt& smmt, const SimConfig& cfg) {
  auto [base, free_rows] = smmt.largest_free_range();

  // Largest N with N data rows + ceil(N/32) tag rows fitting the free range;
  // the 8-bit R field caps N at 256.
  uint32_t n = std::min<uint32_t>(free_rows, 256);
  while (n > 0 && n + (n + 31) / 32 > free_rows) --n;

  TranslationUnit tu;
  tu.cache_rows = n;
  tu.data_offset = base;
  tu.tag_offset = base + n;

  for (uint32_t chunk = 0; chunk < 8; ++chunk) {
    for (uint32_t r = chunk * 32; r < (chunk + 1) * 32 && r < smmt.total_rows(); ++r) {
      if (smmt.row_is_cta_owned(r)) {
        tu.cta_mask |= uint8_t(1u << chunk);
        break;
      }
    }
  }

  smmt.reserve_ciao(base, n == 0 ? 0 : n + (n + 31) / 32);
  (void)cfg;
  return tu;
}

SmemCache::SmemCache(const SimConfig& cfg, const TranslationUnit& tu, Mshr& mshr)
    : cfg_(cfg),
      tu_(tu),
      mshr_(mshr),
      tags_(size_t(2) * tu.cache_rows),
      stats_(cfg.max_warps) {}

SmemAccessOutcome SmemCache::access(WarpId warp, GlobalAddress addr, bool is_store,
                                    Cycle now, L1dCache& l1d,
                                    std::vector<EvictionEvent>& evictions) {
  if (!tu_.has_capacity()) return SmemAccessOutcome::ZeroCapacity;

  Translation tr = tu_.translate(addr);
  SmemTag& resident = slot(tr.data.group, tr.local_row);

  // Tag and data live in opposite bank groups, so both are read this cycle.
  if (resident.valid && resident.tag_bits == tr.tag_expect) {
    if (is_store) ++write_queue_pushes_;  // global write-through
    ++stats_[warp].hits;
    return SmemAccessOutcome::Hit;
  }

  if (is_store) {
    ++write_queue_pushes_;
    ++stats_[warp].bypassed;
    return SmemAccessOutcome::Bypassed;
  }

  if (MshrEntry* pending = mshr_.find(tr.tag_expect)) {
    pending->waiters.push_back(warp);
    ++stats_[warp].misses;
    return SmemAccessOutcome::MissMerged;
  }
  if (mshr_.full()) return SmemAccessOutcome::MshrFull;

  // Direct-mapped: a tag mismatch evicts the resident block.
  if (resident.valid) {
    evictions.push_back({resident.tag_bits, resident.wid, warp});
    ++stats_[warp].evictions_caused;
    if (resident.wid < stats_.size()) ++stats_[resident.wid].evictions_suffered;
    resident.valid = false;
  }

  // Migration path: a copy still in L1D is evicted to the response queue and
  // fills from there, keeping the block exclusive to one structure.
  MshrEntry* entry;
  if (l1d.probe_tag(addr).present) {
    l1d.evict_to_response_queue(addr);
    ++migrations_;
    entry = &mshr_.issue_from_response_queue(tr.tag_expect, warp, now);
  } else {
    entry = &mshr_.issue(tr.tag_expect, FillDestination::Smem, warp, now);
  }
  entry->smem_group = tr.data.group;
  entry->smem_row = tr.local_row;
  ++stats_[warp].misses;
  return SmemAccessOutcome::MissIssued;
}

void SmemCache::install(const MshrEntry& entry, Cycle, std::vector<EvictionEvent>& evictions) {
  assert(entry.destination == FillDestination::Smem);
  SmemTag& s = slot(uint8_t(entry.smem_group), entry.smem_row);
  if (s.valid && s.tag_bits != entry.block) {
    // Two in-flight fills mapped to the same slot; the later one wins.
    evictions.push_back({s.tag_bits, s.wid, entry.owner});
    ++stats_[entry.owner].evictions_caused;
    if (s.wid < stats_.size()) ++stats_[s.wid].evictions_suffered;
  }
  s.valid = true;
  s.wid = entry.owner;
  s.tag_bits = entry.block;
}

void SmemCache::invalidate_owned(WarpId warp) {
  for (auto& t : tags_)
    if (t.valid && t.wid == warp) t.valid = false;
}

void SmemCache::drop_block(uint64_t block) {
  if (!tu_.has_capacity()) return;
  Translation tr = tu_.translate(GlobalAddress(block) << 7);
  SmemTag& s = slot(tr.data.group, tr.local_row);
  if (s.valid && s.tag_bits == block) s.valid = false;
}

std::vector<uint64_t> SmemCache::resident_blocks() const {
  std::vector<uint64_t> out;
  for (const auto& t : tags_)
    if (t.valid) out.push_back(t.tag_bits);
  return out;
}

}  // namespace ciao
