#include "ciao/workloads.hpp"

#include <bit>
#include <cassert>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ciao/l1d_cache.hpp"

namespace ciao {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& token,
                             const std::string& why) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + why + " '" + token + "'");
}

double unit_draw(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1p-53;  // [0,1), platform-independent
}

}  // namespace

Trace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  Trace trace;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string warp_tok, kind_tok, addr_tok, space_tok;
    if (!(ss >> warp_tok)) continue;  // blank line
    TraceRecord rec;
    try {
      size_t pos = 0;
      unsigned long v = std::stoul(warp_tok, &pos, 10);
      if (pos != warp_tok.size()) throw std::invalid_argument(warp_tok);
      rec.warp = static_cast<WarpId>(v);
    } catch (...) {
      parse_fail(path, lineno, warp_tok, "bad warp id");
    }
    if (!(ss >> kind_tok)) parse_fail(path, lineno, line, "missing record kind in");
    if (kind_tok == "A")
      rec.kind = TraceKind::Alu;
    else if (kind_tok == "L")
      rec.kind = TraceKind::Load;
    else if (kind_tok == "S")
      rec.kind = TraceKind::Store;
    else
      parse_fail(path, lineno, kind_tok, "bad record kind");
    if (rec.kind != TraceKind::Alu) {
      if (!(ss >> addr_tok)) parse_fail(path, lineno, line, "missing address in");
      try {
        size_t pos = 0;
        rec.addr = std::stoull(addr_tok, &pos, 16);
        if (pos != addr_tok.size()) throw std::invalid_argument(addr_tok);
      } catch (...) {
        parse_fail(path, lineno, addr_tok, "bad address");
      }
      if (ss >> space_tok) {
        if (space_tok == "local")
          rec.space = MemSpace::Local;
        else
          parse_fail(path, lineno, space_tok, "bad space tag");
      }
    } else if (ss >> space_tok) {
      parse_fail(path, lineno, space_tok, "unexpected token after ALU record");
    }
    trace.push_back(rec);
  }
  return trace;
}

void write_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  char buf[64];
  for (const TraceRecord& r : trace) {
    if (r.kind == TraceKind::Alu) {
      out << r.warp << " A\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, "%u %c 0x%llx%s\n", r.warp,
                  r.kind == TraceKind::Load ? 'L' : 'S',
                  static_cast<unsigned long long>(r.addr),
                  r.space == MemSpace::Local ? " local" : "");
    out << buf;
  }
}

Trace gen_thrash(uint32_t warps, uint32_t sets_touched, uint32_t reuse, uint64_t seed,
                 const SimConfig& cfg) {
  if (warps == 0) throw std::invalid_argument("gen_thrash: warps must be positive");
  if (sets_touched == 0) throw std::invalid_argument("gen_thrash: sets_touched must be positive");
  uint64_t sets = cfg.l1d_sets();
  unsigned log2s = std::countr_zero(sets);
  unsigned log2line = std::countr_zero(uint64_t(cfg.line_bytes));

  // Enough private blocks per warp and set that the combined footprint
  // exceeds the associativity; a single warp keeps a fitting working set.
  uint32_t per_warp = warps == 1 ? 1 : cfg.l1d_ways / warps + 1;

  // Invert the set hash: set = low ^ high, so low = set ^ high for free high.
  auto make_block = [&](uint32_t idx, uint64_t set) {
    uint64_t h = idx % sets;
    uint64_t q = idx / sets;
    uint64_t low = cfg.xor_set_hash ? (set ^ h) : set;
    uint64_t base = (1 + seed % 256) << (2 * log2s + 8);
    return base | (q << (2 * log2s)) | (h << log2s) | low;
  };

  Trace trace;
  trace.reserve(size_t(reuse) * sets_touched * per_warp * warps);
  for (uint32_t r = 0; r < reuse; ++r) {
    for (uint32_t j = 0; j < sets_touched; ++j) {
      uint64_t set = j % sets;
      for (uint32_t k = 0; k < per_warp; ++k) {
        for (uint32_t w = 0; w < warps; ++w) {
          uint64_t block = make_block(w * per_warp + k, set);
          GlobalAddress addr = block << log2line;
          if (addr >= (GlobalAddress(1) << 48))
            throw std::runtime_error("gen_thrash: address budget exceeded");
          assert(set_index(addr, cfg) == set);
          trace.push_back({w, TraceKind::Load, addr, MemSpace::Global});
        }
      }
    }
  }
  return trace;
}

ClassParams class_preset(WorkloadClass cls) {
  ClassParams p;
  p.cls = cls;
  switch (cls) {
    case WorkloadClass::Lws:
      p.warps = 42;
      p.footprint_bytes = 16 * 1024 * 1024;
      p.alu_ratio = 0.1;
      p.records_per_warp = 8000;
      break;
    case WorkloadClass::Sws:
      p.warps = 8;
      p.footprint_bytes = 32 * 1024;
      p.alu_ratio = 0.2;
      break;
    case WorkloadClass::Ci:
      p.warps = 8;
      p.footprint_bytes = 16 * 1024;
      p.alu_ratio = 0.95;
      break;
  }
  return p;
}

Trace gen_class(const ClassParams& p, const SimConfig& cfg) {
  if (p.alu_ratio < 0.0 || p.alu_ratio > 1.0)
    throw std::invalid_argument("gen_class: alu_ratio must be in [0,1]");
  if (p.warps == 0) throw std::invalid_argument("gen_class: warps must be positive");
  uint64_t on_chip = cfg.l1d_size_bytes + cfg.smem_total_bytes;
  switch (p.cls) {
    case WorkloadClass::Lws:
      if (p.footprint_bytes < 4 * on_chip)
        throw std::invalid_argument("gen_class: LWS footprint must far exceed on-chip capacity");
      break;
    case WorkloadClass::Sws:
      if (p.footprint_bytes > cfg.smem_total_bytes)
        throw std::invalid_argument("gen_class: SWS footprint must fit shared memory");
      break;
    case WorkloadClass::Ci:
      if (p.alu_ratio < 0.9)
        throw std::invalid_argument("gen_class: CI needs alu_ratio >= 0.9");
      break;
  }

  const uint64_t line = cfg.line_bytes;
  uint64_t slice_blocks = std::max<uint64_t>(1, p.footprint_bytes / p.warps / line);
  const double irregular_ratio = p.cls == WorkloadClass::Lws ? 0.03 : 0.1;
  constexpr double kStoreRatio = 0.05;
  // One-shot streaming reads (input swept once, like a matrix operand) on top
  // of the reused hot set; they keep warps blocking on fills so no warp
  // monopolizes the scheduler behind a pure hit streak.
  const double stream_ratio = p.cls == WorkloadClass::Ci ? 0.0 : 0.04;

  GlobalAddress region_base = (GlobalAddress(1) << 26) + ((p.seed % 4) << 27);

  std::vector<Trace> streams(p.warps);
  for (uint32_t w = 0; w < p.warps; ++w) {
    std::mt19937_64 rng(p.seed * 0x9e3779b97f4a7c15ull + w + 1);
    GlobalAddress slice_base = region_base + GlobalAddress(w) * slice_blocks * line;
    GlobalAddress stream_base = (GlobalAddress(1) << 30) + (GlobalAddress(w) << 23);
    uint64_t stream_pos = 0;

    // Reused hot set. SWS/CI warps re-sweep their whole slice. LWS warps
    // hammer a single accumulator block (think a partial-sum row), with
    // groups of six warps whose accumulators share one L1D set and, because
    // the blocks differ only above bit 16, one shared-memory slot. Six blocks
    // over four ways thrash, every eviction is cross-warp, and redirection
    // cannot separate them in the direct-mapped shared memory; only dropping
    // the group's concurrency to four or fewer restores hits.
    uint64_t hot_count = slice_blocks;
    if (p.cls == WorkloadClass::Lws) hot_count = 1;
    uint64_t stride_slots = std::max<uint64_t>(1, p.footprint_bytes / 131072);
    auto hot_addr = [&](uint64_t k) -> GlobalAddress {
      if (p.cls == WorkloadClass::Lws) {
        uint64_t group = w / 6;
        return region_base + 4096 + group * 128 +
               ((w + k) % stride_slots) * 131072;
      }
      return slice_base + k * line;
    };

    // LWS warps finish in waves (no barriers), which feeds Algorithm-style
    // reactivation: stalled warps resume as their trigger warps complete.
    uint32_t records = p.records_per_warp;
    if (p.cls == WorkloadClass::Lws && p.warps > 1)
      records = uint32_t(p.records_per_warp * (0.5 + 0.5 * double(w) / double(p.warps - 1)));

    uint64_t hot_pos = 0;
    Trace& s = streams[w];
    s.reserve(records);
    for (uint32_t i = 0; i < records; ++i) {
      if (unit_draw(rng) < p.alu_ratio) {
        s.push_back({w, TraceKind::Alu, 0, MemSpace::Global});
        continue;
      }
      GlobalAddress addr;
      double pick = unit_draw(rng);
      if (pick < stream_ratio) {
        addr = stream_base + (stream_pos++) * line;
      } else if (pick < stream_ratio + irregular_ratio) {
        addr = slice_base + (rng() % slice_blocks) * line;
      } else {
        addr = hot_addr(hot_pos);
        hot_pos = (hot_pos + 1) % hot_count;
      }
      TraceKind kind = unit_draw(rng) < kStoreRatio ? TraceKind::Store : TraceKind::Load;
      s.push_back({w, kind, addr, MemSpace::Global});
    }
  }

  Trace trace;
  trace.reserve(size_t(p.warps) * p.records_per_warp);
  for (uint32_t i = 0; i < p.records_per_warp; ++i)
    for (uint32_t w = 0; w < p.warps; ++w)
      if (i < streams[w].size()) trace.push_back(streams[w][i]);
  return trace;
}

}  // namespace ciao
