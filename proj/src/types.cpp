#include "ciao/types.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ciao {

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::Gto: return "gto";
    case Policy::BestSwl: return "best-swl";
    case Policy::CcwsLite: return "ccws-lite";
    case Policy::CiaoT: return "ciao-t";
    case Policy::CiaoP: return "ciao-p";
    case Policy::CiaoC: return "ciao-c";
  }
  return "?";
}

std::optional<Policy> parse_policy(const std::string& name) {
  for (Policy p : {Policy::Gto, Policy::BestSwl, Policy::CcwsLite, Policy::CiaoT,
                   Policy::CiaoP, Policy::CiaoC}) {
    if (name == policy_name(p)) return p;
  }
  return std::nullopt;
}

SimConfig default_config() { return SimConfig{}; }

std::vector<std::string> validate_config(const SimConfig& cfg) {
  std::vector<std::string> errs;
  auto bad = [&](const std::string& msg) { errs.push_back(msg); };

  if (cfg.line_bytes == 0 || !std::has_single_bit(cfg.line_bytes))
    bad("line_bytes must be a nonzero power of two");
  if (cfg.l1d_ways == 0) bad("l1d_ways must be positive");
  if (cfg.l1d_ways != 0 && cfg.line_bytes != 0) {
    uint64_t way_bytes = uint64_t(cfg.l1d_ways) * cfg.line_bytes;
    if (cfg.l1d_size_bytes == 0 || cfg.l1d_size_bytes % way_bytes != 0 ||
        !std::has_single_bit(cfg.l1d_size_bytes / way_bytes))
      bad("l1d set count (l1d_size_bytes / (l1d_ways * line_bytes)) must be a power of two");
  }
  if (cfg.smem_banks != 32) bad("smem_banks must be 32 (bank-group layout requires it)");
  if (cfg.line_bytes != 128) bad("line_bytes must be 128 (bank-group layout requires it)");
  if (cfg.smem_rows_per_bank == 0 || cfg.smem_rows_per_bank > 256)
    bad("smem_rows_per_bank must be in 1..256 (8-bit row index)");
  if (cfg.smem_total_bytes != uint64_t(cfg.smem_rows_per_bank) * cfg.smem_banks * 8)
    bad("smem_total_bytes must equal smem_rows_per_bank * smem_banks * 8");
  if (cfg.cta_smem_rows > cfg.smem_rows_per_bank)
    bad("cta_smem_rows must not exceed smem_rows_per_bank");
  if (cfg.vta_entries_per_warp == 0) bad("vta_entries_per_warp must be positive");
  if (cfg.max_warps == 0 || cfg.max_warps > 64)
    bad("max_warps must be in 1..64 (6-bit warp ids)");
  if (cfg.vta_sets != cfg.max_warps) bad("vta_sets must equal max_warps (one set per warp)");
  if (!(cfg.high_cutoff > cfg.low_cutoff)) bad("high_cutoff must exceed low_cutoff");
  if (!(cfg.low_cutoff > 0.0)) bad("low_cutoff must be positive");
  if (cfg.low_epoch_insts == 0) bad("low_epoch_insts must be positive");
  if (cfg.high_epoch_insts <= cfg.low_epoch_insts)
    bad("high_epoch_insts must exceed low_epoch_insts");
  if (cfg.mshr_entries == 0) bad("mshr_entries must be positive");
  if (cfg.l2_miss_ratio < 0.0 || cfg.l2_miss_ratio > 1.0)
    bad("l2_miss_ratio must be in [0,1]");
  if (cfg.best_swl_limit &&
      (*cfg.best_swl_limit == 0 || *cfg.best_swl_limit > cfg.max_warps))
    bad("best_swl_limit must be in 1..max_warps");
  return errs;
}

namespace {

template <typename T>
bool parse_uint(const std::string& v, T& out) {
  try {
    size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos, 0);
    if (pos != v.size()) return false;
    out = static_cast<T>(x);
    return static_cast<unsigned long long>(out) == x;
  } catch (...) {
    return false;
  }
}

bool parse_double(const std::string& v, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(v, &pos);
    return pos == v.size();
  } catch (...) {
    return false;
  }
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1") { out = true; return true; }
  if (v == "false" || v == "0") { out = false; return true; }
  return false;
}

}  // namespace

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto strip = [](std::string s) {
      auto sb = s.find_first_not_of(" \t");
      auto se = s.find_last_not_of(" \t");
      return sb == std::string::npos ? std::string() : s.substr(sb, se - sb + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    bool ok = false;
    if (key == "l1d_size_bytes") ok = parse_uint(val, cfg.l1d_size_bytes);
    else if (key == "l1d_ways") ok = parse_uint(val, cfg.l1d_ways);
    else if (key == "line_bytes") ok = parse_uint(val, cfg.line_bytes);
    else if (key == "smem_total_bytes") ok = parse_uint(val, cfg.smem_total_bytes);
    else if (key == "smem_banks") ok = parse_uint(val, cfg.smem_banks);
    else if (key == "smem_rows_per_bank") ok = parse_uint(val, cfg.smem_rows_per_bank);
    else if (key == "cta_smem_rows") ok = parse_uint(val, cfg.cta_smem_rows);
    else if (key == "vta_entries_per_warp") ok = parse_uint(val, cfg.vta_entries_per_warp);
    else if (key == "vta_sets") ok = parse_uint(val, cfg.vta_sets);
    else if (key == "high_cutoff") ok = parse_double(val, cfg.high_cutoff);
    else if (key == "low_cutoff") ok = parse_double(val, cfg.low_cutoff);
    else if (key == "high_epoch_insts") ok = parse_uint(val, cfg.high_epoch_insts);
    else if (key == "low_epoch_insts") ok = parse_uint(val, cfg.low_epoch_insts);
    else if (key == "l2_hit_latency_cycles") ok = parse_uint(val, cfg.l2_hit_latency_cycles);
    else if (key == "dram_latency_cycles") ok = parse_uint(val, cfg.dram_latency_cycles);
    else if (key == "l2_miss_ratio") ok = parse_double(val, cfg.l2_miss_ratio);
    else if (key == "mshr_entries") ok = parse_uint(val, cfg.mshr_entries);
    else if (key == "max_warps") ok = parse_uint(val, cfg.max_warps);
    else if (key == "scheduler") {
      auto p = parse_policy(val);
      if (p) { cfg.scheduler = *p; ok = true; }
    } else if (key == "best_swl_limit") {
      uint32_t n = 0;
      if ((ok = parse_uint(val, n))) cfg.best_swl_limit = n;
    }
    else if (key == "xor_set_hash") ok = parse_bool(val, cfg.xor_set_hash);
    else if (key == "irs_windowed") ok = parse_bool(val, cfg.irs_windowed);
    else if (key == "pair_overwrite") ok = parse_bool(val, cfg.pair_overwrite);
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!ok)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad value '" + val +
                               "' for key '" + key + "'");
  }
  return cfg;
}

void save_config(const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << "l1d_size_bytes = " << cfg.l1d_size_bytes << '\n'
      << "l1d_ways = " << cfg.l1d_ways << '\n'
      << "line_bytes = " << cfg.line_bytes << '\n'
      << "smem_total_bytes = " << cfg.smem_total_bytes << '\n'
      << "smem_banks = " << cfg.smem_banks << '\n'
      << "smem_rows_per_bank = " << cfg.smem_rows_per_bank << '\n'
      << "cta_smem_rows = " << cfg.cta_smem_rows << '\n'
      << "vta_entries_per_warp = " << cfg.vta_entries_per_warp << '\n'
      << "vta_sets = " << cfg.vta_sets << '\n'
      << "high_cutoff = " << cfg.high_cutoff << '\n'
      << "low_cutoff = " << cfg.low_cutoff << '\n'
      << "high_epoch_insts = " << cfg.high_epoch_insts << '\n'
      << "low_epoch_insts = " << cfg.low_epoch_insts << '\n'
      << "l2_hit_latency_cycles = " << cfg.l2_hit_latency_cycles << '\n'
      << "dram_latency_cycles = " << cfg.dram_latency_cycles << '\n'
      << "l2_miss_ratio = " << cfg.l2_miss_ratio << '\n'
      << "mshr_entries = " << cfg.mshr_entries << '\n'
      << "max_warps = " << cfg.max_warps << '\n'
      << "scheduler = " << policy_name(cfg.scheduler) << '\n';
  if (cfg.best_swl_limit) out << "best_swl_limit = " << *cfg.best_swl_limit << '\n';
  out << "xor_set_hash = " << (cfg.xor_set_hash ? "true" : "false") << '\n'
      << "irs_windowed = " << (cfg.irs_windowed ? "true" : "false") << '\n'
      << "pair_overwrite = " << (cfg.pair_overwrite ? "true" : "false") << '\n';
}

}  // namespace ciao
