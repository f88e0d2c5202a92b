#ifndef CIAO_WORKLOADS_HPP
#define CIAO_WORKLOADS_HPP

#include <cstdint>
#include <string>

#include "ciao/types.hpp"

namespace ciao {

// Trace files: one record per line, `<warp_id> <A|L|S> [<hex_addr>] [local]`,
// `#` starts a comment. Throws with line number and offending token.
Trace read_trace(const std::string& path);
void write_trace(const Trace& trace, const std::string& path);

// Cache-thrashing workload: every warp owns ways/warps+1 private blocks per
// touched set, all colliding under the configured set hash; each block is
// revisited `reuse` times. Interfering re-references guarantee conflict
// misses whenever warps share a set.
Trace gen_thrash(uint32_t warps, uint32_t sets_touched, uint32_t reuse, uint64_t seed,
                 const SimConfig& cfg);

enum class WorkloadClass : uint8_t { Lws, Sws, Ci };

struct ClassParams {
  WorkloadClass cls = WorkloadClass::Sws;
  uint32_t warps = 8;
  uint64_t footprint_bytes = 24 * 1024;
  double alu_ratio = 0.2;
  uint64_t seed = 1;
  uint32_t records_per_warp = 20000;
};

ClassParams class_preset(WorkloadClass cls);

// Per-warp mixture of strided reuse loops and seeded irregular accesses over
// a private slice of the footprint, interleaved with ALU records.
Trace gen_class(const ClassParams& p, const SimConfig& cfg);

}  // namespace ciao

#endif  // CIAO_WORKLOADS_HPP
