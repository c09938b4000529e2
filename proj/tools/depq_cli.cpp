// depq: benchmark, stress, linearizability checking and scenario replay for
// the concurrent double-ended priority queues in this repository.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "depq/harness.hpp"
#include "depq/lincheck.hpp"
#include "depq/sched.hpp"

namespace {

using namespace depq;
using namespace depq::harness;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAudit = 3;
constexpr int kExitNotLinearizable = 4;
constexpr int kExitSchedule = 5;

struct Flags {
  std::string impl = "list-depq";
  std::string mode = "combining";
  std::string reclaim = "deferred";
  std::string format = "json";
  std::string key_range;
  std::string capture;
  std::uint64_t ops = 0;
  std::uint64_t duration_ms = 0;
  int windows = 500;
  int max_ops = 12;
  bool sequential = false;
  bool optional_delete = false;
  bool inject_bug = false;
  WorkloadConfig cfg;
};

void add_workload_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--impl", f.impl, "list-depq | dual-heap | dual-list")->capture_default_str();
  cmd->add_option("--mode", f.mode, "two-locks | combining (dual impls)")->capture_default_str();
  cmd->add_option("--threads-insert", f.cfg.threads_insert)->capture_default_str();
  cmd->add_option("--threads-min", f.cfg.threads_min)->capture_default_str();
  cmd->add_option("--threads-max", f.cfg.threads_max)->capture_default_str();
  cmd->add_option("--prefill", f.cfg.prefill)->capture_default_str();
  cmd->add_option("--key-range", f.key_range, "LO:HI (inclusive), default 0:1000000");
  cmd->add_option("--seed", f.cfg.seed)->capture_default_str();
  cmd->add_option("--batch-cap", f.cfg.batch_cap, "combiner batch size")->capture_default_str();
  cmd->add_option("--reclaim", f.reclaim, "deferred | epoch")->capture_default_str();
  cmd->add_flag("--optional-delete", f.optional_delete,
                "dual-heap: delete the item from the opposite queue after a win");
  cmd->add_flag("--inject-bug", f.inject_bug,
                "list-depq: skip the reservation step (mutation testing)");
}

void resolve(Flags& f) {
  f.cfg.impl = parse_impl(f.impl);
  f.cfg.mode = parse_mode(f.mode);
  f.cfg.reclaim = parse_reclaim(f.reclaim);
  f.cfg.sequential = f.sequential;
  f.cfg.optional_delete = f.optional_delete;
  f.cfg.inject_bug = f.inject_bug;
  if (f.ops != 0) f.cfg.ops_per_thread = f.ops;
  if (f.duration_ms != 0) f.cfg.duration_ms = f.duration_ms;
  if (!f.key_range.empty()) {
    const auto colon = f.key_range.find(':');
    if (colon == std::string::npos) throw ConfigError("--key-range expects LO:HI");
    try {
      f.cfg.key_lo = std::stoll(f.key_range.substr(0, colon));
      f.cfg.key_hi = std::stoll(f.key_range.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("--key-range expects LO:HI");
    }
  }
}

int cmd_bench(Flags& f) {
  resolve(f);
  if (f.format != "json" && f.format != "csv") throw ConfigError("--format must be json or csv");
  const RunReport r = run_bench(f.cfg);
  if (f.format == "json") {
    std::cout << to_json(r) << '\n';
  } else {
    std::cout << csv_header() << '\n' << to_csv(r) << '\n';
  }
  if (!r.audit_ok) {
    std::cerr << "audit failed:\n" << r.audit_message;
    return kExitAudit;
  }
  if (!r.accounting_ok) {
    std::cerr << "accounting identity violated\n";
    return kExitAudit;
  }
  return kExitOk;
}

int cmd_stress(Flags& f) {
  if (f.ops == 0) f.ops = 1;  // unused by windows; satisfies validation
  resolve(f);
  validate(f.cfg);
  StressConfig sc;
  sc.base = f.cfg;
  sc.windows = f.windows;
  sc.max_ops = f.max_ops;
  std::ofstream capture;
  if (!f.capture.empty()) {
    capture.open(f.capture);
    if (!capture) throw ConfigError("cannot open capture file " + f.capture);
  }
  const StressResult res = run_stress(sc, f.capture.empty() ? nullptr : &capture);
  std::cout << "windows: " << res.windows << "  linearizable: " << res.linearizable
            << "  not_linearizable: " << res.not_linearizable
            << "  budget_exceeded: " << res.budget_exceeded << '\n';
  if (!res.first_failure) return kExitOk;
  const std::string base = f.capture.empty() ? std::string("stress") : f.capture;
  const std::string path = base + ".fail-" + std::to_string(*res.first_failure) + ".jsonl";
  std::ofstream out(path);
  lincheck::write_jsonl(out, res.failing);
  std::cout << "offending history: " << path << '\n';
  return kExitNotLinearizable;
}

int cmd_lincheck(const std::string& file, std::uint64_t budget) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file);
  const auto histories = lincheck::read_jsonl(in);
  lincheck::CheckOptions opts;
  opts.state_budget = budget;
  opts.max_completed_ops = 64;
  int worst = kExitOk;
  for (std::size_t i = 0; i < histories.size(); ++i) {
    const auto r = lincheck::check(histories[i], opts);
    std::cout << "history " << i << ": " << lincheck::to_string(r.verdict);
    if (r.verdict == lincheck::Verdict::Linearizable) {
      std::cout << "  witness:";
      for (auto idx : r.witness) std::cout << ' ' << idx;
    }
    std::cout << '\n';
    if (r.verdict != lincheck::Verdict::Linearizable) worst = kExitNotLinearizable;
  }
  return worst;
}

int cmd_replay(const std::string& name) {
  const ReplayResult r = replay(name);
  std::cout << "replay " << r.name << '\n';
  for (const auto& line : r.lines) std::cout << "  " << line << '\n';
  std::cout << "verdict: " << r.verdict << '\n';
  return r.passed ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concurrent double-ended priority queue toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 2 invalid config, 3 audit/accounting failure, 4 not linearizable,\n"
      "5 schedule not realizable.\n"
      "CSV columns (bench --format csv): " + csv_header());

  Flags bench_flags;
  auto* bench = app.add_subcommand("bench", "run a workload and report throughput and counters");
  add_workload_flags(bench, bench_flags);
  auto* ops_opt = bench->add_option("--ops", bench_flags.ops, "operations per worker thread");
  auto* dur_opt = bench->add_option("--duration-ms", bench_flags.duration_ms, "run time");
  ops_opt->excludes(dur_opt);
  bench->add_flag("--sequential", bench_flags.sequential,
                  "run all worker streams round-robin on one thread");
  bench->add_option("--format", bench_flags.format, "json | csv")->capture_default_str();

  Flags stress_flags;
  auto* stress = app.add_subcommand("stress", "check many short concurrent windows");
  add_workload_flags(stress, stress_flags);
  stress->add_option("--windows", stress_flags.windows)->capture_default_str();
  stress->add_option("--ops", stress_flags.max_ops, "max completed ops per window")
      ->capture_default_str();
  stress->add_option("--capture", stress_flags.capture, "write histories (JSON lines) here");

  std::string lincheck_file;
  std::uint64_t budget = lincheck::CheckOptions{}.state_budget;
  auto* lc = app.add_subcommand("lincheck", "check histories recorded in a JSON-lines file");
  lc->add_option("FILE", lincheck_file)->required();
  lc->add_option("--budget", budget, "search state budget")->capture_default_str();

  std::string replay_name;
  auto* rp = app.add_subcommand("replay", "force a named interleaving");
  rp->add_option("NAME", replay_name, "counterexample | twist | single-item-race")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*bench) return cmd_bench(bench_flags);
    if (*stress) return cmd_stress(stress_flags);
    if (*lc) return cmd_lincheck(lincheck_file, budget);
    if (*rp) return cmd_replay(replay_name);
  } catch (const sched::ScheduleError& e) {
    std::cerr << "schedule not realizable: " << e.what() << '\n';
    return kExitSchedule;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}
