#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ciao/engine.hpp"
#include "ciao/types.hpp"
#include "ciao/workloads.hpp"

namespace fs = std::filesystem;
using namespace ciao;

namespace {

// Exit codes: 1 usage, 2 missing input, 3 config violation, 4 trace parse
// error, 5 run failure.
constexpr int kExitUsage = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitBadConfig = 3;
constexpr int kExitParseError = 4;
constexpr int kExitRunFailure = 5;

SimConfig load_cfg_or_exit(const std::string& config_path) {
  SimConfig cfg;
  if (!config_path.empty()) {
    if (!fs::exists(config_path)) {
      std::cerr << "config file not found: " << config_path << "\n";
      std::exit(kExitMissingInput);
    }
    try {
      cfg = load_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      std::exit(kExitBadConfig);
    }
  }
  auto errs = validate_config(cfg);
  if (!errs.empty()) {
    for (const auto& e : errs) std::cerr << "config: " << e << "\n";
    std::exit(kExitBadConfig);
  }
  return cfg;
}

uint64_t trace_footprint_bytes(const Trace& trace, const SimConfig& cfg) {
  std::set<uint64_t> blocks;
  for (const auto& r : trace)
    if (r.kind != TraceKind::Alu) blocks.insert(block_index(r.addr, cfg));
  return blocks.size() * uint64_t(cfg.line_bytes);
}

unsigned sweep_threads(size_t cells) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("CIAO_SIM_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<size_t>(n, cells ? cells : 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ciao-sim: trace-driven SM memory-subsystem and warp-scheduler simulator"};
  app.require_subcommand(1);

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic trace");
  gen->require_subcommand(1);

  std::string gen_out, gen_config;
  uint64_t gen_seed = 1;

  auto* thrash = gen->add_subcommand("thrash", "set-colliding private blocks per warp");
  uint32_t th_warps = 2, th_sets = 1, th_reuse = 64;
  thrash->add_option("--warps", th_warps, "warp count")->capture_default_str();
  thrash->add_option("--sets", th_sets, "L1D sets touched")->capture_default_str();
  thrash->add_option("--reuse", th_reuse, "revisits per private block")->capture_default_str();
  thrash->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  thrash->add_option("-o,--out", gen_out, "output trace file")->required();
  thrash->add_option("--config", gen_config, "config file (set hash geometry)");

  auto* klass = gen->add_subcommand("class", "LWS/SWS/CI workload-class preset");
  std::string cls_name = "sws";
  uint32_t cl_warps = 0, cl_length = 0;
  uint64_t cl_footprint = 0;
  double cl_alu = -1.0;
  klass->add_option("--class", cls_name, "lws|sws|ci")->capture_default_str();
  klass->add_option("--warps", cl_warps, "warp count (default per class)");
  klass->add_option("--footprint", cl_footprint, "footprint bytes (default per class)");
  klass->add_option("--alu-ratio", cl_alu, "ALU fraction (default per class)");
  klass->add_option("--length", cl_length, "records per warp (default per class)");
  klass->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  klass->add_option("-o,--out", gen_out, "output trace file")->required();
  klass->add_option("--config", gen_config, "config file (capacity checks)");

  // --- run ---------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "simulate a trace under one or more policies");
  std::string run_trace, run_config, run_out = "out", run_policies = "gto";
  bool debug_coherence = false;
  uint32_t best_swl_limit = 0;
  run_cmd->add_option("--trace", run_trace, "input trace file")->required();
  run_cmd->add_option("--config", run_config, "config file");
  run_cmd->add_option("--policy", run_policies,
                      "comma-separated: gto,best-swl,ccws-lite,ciao-t,ciao-p,ciao-c")
      ->capture_default_str();
  run_cmd->add_option("--out", run_out, "output directory")->capture_default_str();
  run_cmd->add_flag("--debug-coherence", debug_coherence,
                    "enable the per-cycle L1D/smem exclusivity auditor");
  run_cmd->add_option("--best-swl-limit", best_swl_limit, "Best-SWL warp limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  if (gen->parsed()) {
    SimConfig cfg = load_cfg_or_exit(gen_config);
    Trace trace;
    try {
      if (thrash->parsed()) {
        trace = gen_thrash(th_warps, th_sets, th_reuse, gen_seed, cfg);
      } else {
        WorkloadClass cls;
        if (cls_name == "lws") cls = WorkloadClass::Lws;
        else if (cls_name == "sws") cls = WorkloadClass::Sws;
        else if (cls_name == "ci") cls = WorkloadClass::Ci;
        else {
          std::cerr << "unknown class '" << cls_name << "' (lws|sws|ci)\n";
          return kExitUsage;
        }
        ClassParams p = class_preset(cls);
        p.seed = gen_seed;
        if (cl_warps) p.warps = cl_warps;
        if (cl_footprint) p.footprint_bytes = cl_footprint;
        if (cl_alu >= 0.0) p.alu_ratio = cl_alu;
        if (cl_length) p.records_per_warp = cl_length;
        trace = gen_class(p, cfg);
      }
      write_trace(trace, gen_out);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kExitUsage;
    }
    std::cout << "wrote " << gen_out << ": " << trace.size() << " records, footprint "
              << trace_footprint_bytes(trace, cfg) << " bytes\n";
    return 0;
  }

  // run
  SimConfig cfg = load_cfg_or_exit(run_config);
  if (best_swl_limit) cfg.best_swl_limit = best_swl_limit;

  if (!fs::exists(run_trace)) {
    std::cerr << "trace file not found: " << run_trace << "\n";
    return kExitMissingInput;
  }
  Trace trace;
  try {
    trace = read_trace(run_trace);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  }

  std::vector<Policy> policies;
  {
    std::stringstream ss(run_policies);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto p = parse_policy(item);
      if (!p) {
        std::cerr << "unknown policy '" << item << "'\n";
        return kExitUsage;
      }
      policies.push_back(*p);
    }
    if (policies.empty()) {
      std::cerr << "no policy given\n";
      return kExitUsage;
    }
  }

  std::vector<RunSpec> cells;
  for (Policy p : policies) {
    RunSpec spec;
    spec.trace = &trace;
    spec.trace_name = fs::path(run_trace).filename().string();
    spec.cfg = cfg;
    spec.cfg.scheduler = p;
    spec.opts.debug_coherence = debug_coherence;
    {
      auto errs = validate_config(spec.cfg);
      if (!errs.empty()) {
        for (const auto& e : errs) std::cerr << "config: " << e << "\n";
        return kExitBadConfig;
      }
    }
    cells.push_back(std::move(spec));
  }

  auto results = run_matrix(cells, sweep_threads(cells.size()));

  fs::create_directories(run_out);
  write_summary_csv(results, (fs::path(run_out) / "summary.csv").string());
  for (const auto& r : results) {
    if (!r.ok) continue;
    fs::path dir = fs::path(run_out) / policy_name(r.policy);
    fs::create_directories(dir);
    write_interference_csv(r.stats, (dir / "interference.csv").string());
    write_timeline_csv(r.stats, (dir / "timeline.csv").string());
    write_epochs_csv(r.stats, (dir / "epochs.csv").string());
    write_warps_csv(r.stats, (dir / "warps.csv").string());
  }

  const RunResult* gto = nullptr;
  for (const auto& r : results)
    if (r.ok && r.policy == Policy::Gto) gto = &r;

  std::printf("%-10s %10s %12s %8s %8s %9s %9s\n", "policy", "cycles", "insts", "ipc",
              gto ? "ipc/gto" : "-", "l1d_hit", "smem_hit");
  bool any_failed = false;
  for (const auto& r : results) {
    if (!r.ok) {
      any_failed = true;
      std::printf("%-10s FAILED: %s\n", policy_name(r.policy), r.error.c_str());
      continue;
    }
    double rel = gto && gto->stats.ipc > 0 ? r.stats.ipc / gto->stats.ipc : 0.0;
    std::printf("%-10s %10llu %12llu %8.4f %8.3f %9.4f %9.4f\n", policy_name(r.policy),
                static_cast<unsigned long long>(r.stats.cycles),
                static_cast<unsigned long long>(r.stats.instructions), r.stats.ipc, rel,
                r.stats.l1d_hit_rate(), r.stats.smem_hit_rate());
  }
  if (debug_coherence) {
    for (const auto& r : results)
      if (r.ok && r.stats.coherence_violations)
        std::printf("COHERENCE VIOLATIONS (%s): %llu\n", policy_name(r.policy),
                    static_cast<unsigned long long>(r.stats.coherence_violations));
  }
  return any_failed ? kExitRunFailure : 0;
}
