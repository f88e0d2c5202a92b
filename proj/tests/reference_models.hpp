#ifndef CIAO_TESTS_REFERENCE_MODELS_HPP
#define CIAO_TESTS_REFERENCE_MODELS_HPP

// Test-only reference models. Deliberately naive (associative lists, linear
// scans) and independent of the implementation under src/; they only share
// the documented formulas.

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace ciaoref {

// Set-associative LRU cache over block indices. Fills are immediate.
class RefCache {
 public:
  RefCache(size_t sets, size_t ways, bool xor_hash)
      : sets_(sets), ways_(ways), xor_hash_(xor_hash), content_(sets) {
    log2s_ = 0;
    while ((size_t(1) << log2s_) < sets_) ++log2s_;
  }

  size_t set_of(uint64_t block) const {
    size_t low = block & (sets_ - 1);
    if (!xor_hash_) return low;
    size_t high = (block >> log2s_) & (sets_ - 1);
    return low ^ high;
  }

  struct Result {
    bool hit = false;
    std::optional<uint64_t> evicted;  // block pushed out by this fill
  };

  Result access(uint64_t block) {
    auto& set = content_[set_of(block)];
    for (size_t i = 0; i < set.size(); ++i) {
      if (set[i] == block) {
        set.erase(set.begin() + i);
        set.push_back(block);  // most recently used at the back
        return {true, std::nullopt};
      }
    }
    Result r;
    if (set.size() == ways_) {
      r.evicted = set.front();
      set.erase(set.begin());
    }
    set.push_back(block);
    return r;
  }

  bool contains(uint64_t block) const {
    const auto& set = content_[set_of(block)];
    for (uint64_t b : set)
      if (b == block) return true;
    return false;
  }

 private:
  size_t sets_, ways_;
  bool xor_hash_;
  unsigned log2s_;
  std::vector<std::vector<uint64_t>> content_;
};

// Direct-mapped cache over the shared-memory data-location bits, with its
// own bit slicing: group = addr[7], row = addr[15:8] mod rows.
class RefDirectMapped {
 public:
  explicit RefDirectMapped(uint32_t rows) : rows_(rows) {}

  struct Result {
    bool hit = false;
    std::optional<uint64_t> evicted;
  };

  Result access(uint64_t addr) {
    unsigned group = (addr >> 7) & 1;
    uint32_t row = uint32_t((addr >> 8) & 0xff) % rows_;
    uint64_t block = addr >> 7;
    auto key = std::make_pair(group, row);
    auto it = content_.find(key);
    if (it != content_.end() && it->second == block) return {true, std::nullopt};
    Result r;
    if (it != content_.end()) r.evicted = it->second;
    content_[key] = block;
    return r;
  }

 private:
  uint32_t rows_;
  std::map<std::pair<unsigned, uint32_t>, uint64_t> content_;
};

// Per-warp FIFO victim-tag lists with linear scans; a hit consumes the
// oldest matching entry.
class RefVta {
 public:
  RefVta(size_t warps, size_t capacity) : capacity_(capacity), sets_(warps) {}

  void record(uint32_t victim, uint64_t block, uint32_t evictor) {
    auto& s = sets_[victim];
    if (s.size() == capacity_) s.erase(s.begin());
    s.push_back({block, evictor});
  }

  std::optional<uint32_t> check(uint32_t warp, uint64_t block) {
    auto& s = sets_[warp];
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i].first == block) {
        uint32_t evictor = s[i].second;
        s.erase(s.begin() + i);
        return evictor;
      }
    }
    return std::nullopt;
  }

 private:
  size_t capacity_;
  std::vector<std::vector<std::pair<uint64_t, uint32_t>>> sets_;
};

}  // namespace ciaoref

#endif
