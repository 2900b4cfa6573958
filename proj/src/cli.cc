#include "lfuzz/cli.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "lfuzz/benchmarks.h"
#include "lfuzz/campaign.h"
#include "lfuzz/detectors.h"
#include "lfuzz/input.h"
#include "lfuzz/interpreter.h"
#include "lfuzz/parser.h"
#include "lfuzz/report.h"

namespace lfuzz {

namespace {

using nlohmann::json;

// Error in user-supplied data (target, seed files, reports): exit 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Replay did not reproduce the recorded result: exit 2.
class ReplayMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CampaignOptions {
  std::string learning = "on";
  std::optional<double> time_limit;
  uint64_t max_execs = 0;
  uint64_t seed = 0;
  size_t max_calls = 3;
  std::string metric_strategy = "random";
  std::string pick = "random";
  bool ignore_entry_requires = false;
  std::vector<std::string> seed_files;
  uint64_t energy_base = 16;
  uint64_t energy_cap = 1024;
  double structural = 0.1;
  std::optional<size_t> target_paths;
  std::string stop_on_bug;
  uint64_t fuel = kDefaultFuel;
  unsigned word_bits = 64;
  bool unchecked = false;
  std::optional<uint64_t> probe;
};

void AddCampaignOptions(CLI::App* cmd, CampaignOptions& o, bool with_learning) {
  if (with_learning) {
    cmd->add_option("--learning", o.learning, "Enable the learning step")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
  }
  cmd->add_option("--time-limit", o.time_limit, "Wall-clock limit in seconds");
  cmd->add_option("--max-execs", o.max_execs,
                  "Execution budget (default 100000 when no other limit is set)");
  cmd->add_option("--seed", o.seed, "Campaign RNG seed")->capture_default_str();
  cmd->add_option("--max-calls", o.max_calls, "Maximum calls per input")
      ->check(CLI::Range(size_t{1}, size_t{64}))
      ->capture_default_str();
  cmd->add_option("--metric-strategy", o.metric_strategy, "Learning metric choice")
      ->check(CLI::IsMember({"random", "rarest-site"}))
      ->capture_default_str();
  cmd->add_option("--pick", o.pick, "Corpus pick strategy")
      ->check(CLI::IsMember({"random", "rarity"}))
      ->capture_default_str();
  cmd->add_flag("--ignore-entry-requires", o.ignore_entry_requires,
                "Do not report failures of a function's leading requires");
  cmd->add_option("--seeds", o.seed_files, "Seed input files (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--energy-base", o.energy_base, "Energy for a first selection")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--energy-cap", o.energy_cap, "Energy upper bound")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--structural", o.structural, "Structural mutation probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--target-paths", o.target_paths, "Stop once this many paths are found");
  cmd->add_option("--stop-on-bug", o.stop_on_bug, "Stop once a bug of this kind is found")
      ->check(CLI::IsMember({"AssertionViolation", "PreconditionViolation",
                             "CheckedArithError", "ArbitraryStorageWrite"}));
  cmd->add_option("--fuel", o.fuel, "Step budget per execution")->capture_default_str();
  cmd->add_option("--word-bits", o.word_bits, "Machine word width")
      ->check(CLI::IsMember({8, 16, 32, 64}))
      ->capture_default_str();
  cmd->add_flag("--unchecked", o.unchecked, "Wrap on arithmetic overflow instead of trapping");
  cmd->add_option("--probe", o.probe, "Fixed probe address for storage-write detection");
}

CampaignConfig MakeConfig(const CampaignOptions& o) {
  CampaignConfig cfg;
  cfg.rng_seed = o.seed;
  cfg.learning_enabled = o.learning == "on";
  cfg.max_execs = o.max_execs;
  cfg.time_limit_seconds = o.time_limit;
  cfg.target_paths = o.target_paths;
  if (!o.stop_on_bug.empty()) cfg.stop_on_bug = BugKindFromName(o.stop_on_bug);
  if (cfg.max_execs == 0 && !cfg.time_limit_seconds && !cfg.target_paths &&
      !cfg.stop_on_bug) {
    cfg.max_execs = 100'000;
  }
  cfg.max_calls = o.max_calls;
  cfg.mutation.structural = o.structural;
  cfg.metric_strategy =
      o.metric_strategy == "rarest-site" ? MetricStrategy::kRarestSite : MetricStrategy::kRandom;
  cfg.pick_strategy = o.pick == "rarity" ? PickStrategy::kRarity : PickStrategy::kUniform;
  cfg.energy = {o.energy_base, std::max(o.energy_base, o.energy_cap)};
  cfg.probe_address = o.probe;
  cfg.exec.word = IntWidth{o.word_bits};
  cfg.exec.checked_arithmetic = !o.unchecked;
  cfg.exec.fuel = o.fuel;
  cfg.detector.ignore_entry_requires = o.ignore_entry_requires;
  return cfg;
}

ExecConfig ExecConfigFromJson(const json& config, uint64_t probe) {
  ExecConfig cfg;
  cfg.word = IntWidth{config.value("word_bits", 64u)};
  cfg.checked_arithmetic = config.value("checked_arithmetic", true);
  cfg.fuel = config.value("fuel", kDefaultFuel);
  cfg.probe_address = probe;
  return cfg;
}

TargetProgram LoadTargetOrThrow(const std::string& spec) {
  try {
    return LoadTarget(spec);
  } catch (const ParseError& e) {
    throw UsageError(spec + ":" + std::to_string(e.line()) + ":" +
                     std::to_string(e.column()) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

InputVector LoadInputFile(const TargetProgram& prog, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return InputFromJson(prog, json::parse(in));
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const InputError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<InputVector> LoadSeeds(const TargetProgram& prog,
                                   const std::vector<std::string>& files) {
  std::vector<InputVector> seeds;
  for (const std::string& f : files) seeds.push_back(LoadInputFile(prog, f));
  return seeds;
}

std::string FormatRate(const std::optional<double>& r) {
  if (!r) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *r);
  return buf;
}

void PrintSummary(const TargetProgram& prog, const CampaignReport& r, std::ostream& out) {
  out << "target " << prog.name << "  stop " << r.stop_reason << "  seconds "
      << r.seconds << "\n";
  out << "P " << r.paths << "  B " << r.bug_count << "  E " << r.execs << "  S_L "
      << r.learn_success << "  F_L " << r.learn_fail << "  R_L " << FormatRate(r.learn_rate)
      << "\n";
  for (const ReportBug& b : r.bugs) {
    out << "bug " << b.id << " " << BugKindName(b.kind) << " site " << b.site
        << " exec " << b.execs << "  " << b.witness.dump() << "\n";
  }
}

int RunFuzz(const std::string& target, const CampaignOptions& o,
            const std::string& out_dir, std::ostream& out) {
  const TargetProgram prog = LoadTargetOrThrow(target);
  const CampaignConfig cfg = MakeConfig(o);
  const std::vector<InputVector> seeds = LoadSeeds(prog, o.seed_files);
  const CampaignResult result = RunCampaign(prog, seeds, cfg);
  const CampaignReport report = MakeReport(prog, target, cfg, result);
  PrintSummary(prog, report, out);
  if (!out_dir.empty()) {
    EmitReport(report, result.events, out_dir);
    out << "report written to " << out_dir << "\n";
  }
  return kExitOk;
}

struct TrialRow {
  uint64_t seed;
  CampaignResult on;
  CampaignResult off;
};

uint64_t LastPathExec(const CampaignResult& r) {
  return r.coverage.empty() ? 0 : r.coverage.back().execs;
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

int RunCompare(const std::string& target, const CampaignOptions& o, size_t trials,
               std::ostream& out) {
  const TargetProgram prog = LoadTargetOrThrow(target);
  const std::vector<InputVector> seeds = LoadSeeds(prog, o.seed_files);
  CampaignOptions on_opts = o;
  on_opts.learning = "on";
  CampaignOptions off_opts = o;
  off_opts.learning = "off";

  std::vector<TrialRow> rows(trials);
  auto run_side = [&](bool learning) {
    for (size_t i = 0; i < trials; ++i) {
      CampaignOptions opts = learning ? on_opts : off_opts;
      opts.seed = o.seed + i;
      CampaignResult r = RunCampaign(prog, seeds, MakeConfig(opts));
      rows[i].seed = opts.seed;
      (learning ? rows[i].on : rows[i].off) = std::move(r);
    }
  };
  // The two sides share nothing but the read-only program.
  std::exception_ptr failure;
  std::thread off_worker([&] {
    try {
      run_side(false);
    } catch (...) {
      failure = std::current_exception();
    }
  });
  run_side(true);
  off_worker.join();
  if (failure) std::rethrow_exception(failure);

  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-8s | %4s %4s %10s %10s %5s | %4s %4s %10s %10s\n",
                "trial", "seed", "P", "B", "E", "E@last", "R_L", "P", "B", "E", "E@last");
  out << "target " << prog.name << ": learning on | learning off\n" << line;
  std::vector<double> e_on, e_off, last_on, last_off, p_on, p_off;
  for (size_t i = 0; i < trials; ++i) {
    const TrialRow& row = rows[i];
    std::snprintf(line, sizeof line,
                  "%-6zu %-8llu | %4zu %4zu %10llu %10llu %5s | %4zu %4zu %10llu %10llu\n",
                  i + 1, static_cast<unsigned long long>(row.seed), row.on.corpus.size(),
                  row.on.bugs.size(), static_cast<unsigned long long>(row.on.stats.execs),
                  static_cast<unsigned long long>(LastPathExec(row.on)),
                  FormatRate(row.on.stats.learn_rate()).c_str(), row.off.corpus.size(),
                  row.off.bugs.size(), static_cast<unsigned long long>(row.off.stats.execs),
                  static_cast<unsigned long long>(LastPathExec(row.off)));
    out << line;
    e_on.push_back(static_cast<double>(row.on.stats.execs));
    e_off.push_back(static_cast<double>(row.off.stats.execs));
    last_on.push_back(static_cast<double>(LastPathExec(row.on)));
    last_off.push_back(static_cast<double>(LastPathExec(row.off)));
    p_on.push_back(static_cast<double>(row.on.corpus.size()));
    p_off.push_back(static_cast<double>(row.off.corpus.size()));
  }
  std::snprintf(line, sizeof line, "%-15s | %4.1f %4s %10.1f %10.1f %5s | %4.1f %4s %10.1f %10.1f\n",
                "median", Median(p_on), "", Median(e_on), Median(last_on), "", Median(p_off),
                "", Median(e_off), Median(last_off));
  out << line;
  // With --target-paths, E is the exec count at which a side stopped, so the
  // ratio compares time to coverage; censored runs count as the budget.
  const double m_on = Median(e_on);
  if (m_on > 0) {
    std::snprintf(line, sizeof line, "median E ratio (off/on): %.2f\n", Median(e_off) / m_on);
    out << line;
  }
  return kExitOk;
}

void PrintExecution(const TargetProgram& prog, const InputVector& input,
                    const ExecutionResult& res, const std::vector<Finding>& findings,
                    std::ostream& out) {
  out << "input " << FormatInput(prog, input) << "\n";
  out << "path " << PathIdHex(ComputePathId(res.trace)) << "\n";
  for (size_t i = 0; i < res.outcomes.size(); ++i) {
    const CallOutcome& o = res.outcomes[i];
    out << "call " << i << ": ";
    switch (o.kind) {
      case OutcomeKind::kReturned: out << "returned " << o.value; break;
      case OutcomeKind::kRequireFailed: out << "require failed at site " << o.site; break;
      case OutcomeKind::kAssertFailed: out << "assert failed at site " << o.site; break;
      case OutcomeKind::kCheckedError:
        out << CheckedErrorName(o.error) << " at site " << o.site;
        break;
      case OutcomeKind::kFuelExhausted: out << "fuel exhausted"; break;
    }
    out << "\n";
  }
  out << "costs";
  for (const auto& [site, cost] : res.costs.entries()) {
    if (cost != 0) out << " " << CostSiteName(site) << "=" << CostToString(cost);
  }
  out << "\n";
  for (const Finding& f : findings) {
    out << "finding " << BugKindName(f.kind) << " site " << f.site << "\n";
  }
}

int RunReplay(const std::string& report_file, std::optional<uint64_t> bug_id,
              const std::string& input_file, std::ostream& out) {
  CampaignReport report;
  try {
    report = LoadReport(report_file);
  } catch (const ReportError& e) {
    throw UsageError(e.what());
  }
  const TargetProgram prog = LoadTargetOrThrow(report.target);
  const ExecConfig exec_cfg = ExecConfigFromJson(report.config, report.probe_address);
  DetectorOptions det_opts;
  det_opts.ignore_entry_requires = report.config.value("ignore_entry_requires", false);
  const Detector detector(prog, det_opts);

  InputVector input;
  std::optional<ReportBug> bug;
  if (bug_id) {
    auto it = std::find_if(report.bugs.begin(), report.bugs.end(),
                           [&](const ReportBug& b) { return b.id == *bug_id; });
    if (it == report.bugs.end()) {
      throw UsageError("report has no bug with id " + std::to_string(*bug_id));
    }
    bug = *it;
    try {
      input = InputFromJson(prog, it->witness);
    } catch (const InputError& e) {
      throw UsageError(std::string("witness: ") + e.what());
    }
  } else {
    input = LoadInputFile(prog, input_file);
  }

  const ExecutionResult res = Execute(prog, input, exec_cfg);
  const std::vector<Finding> findings = detector.Classify(res, exec_cfg.probe_address);
  PrintExecution(prog, input, res, findings, out);

  if (bug) {
    const Finding want{bug->kind, bug->site};
    if (std::find(findings.begin(), findings.end(), want) == findings.end()) {
      throw ReplayMismatch("witness did not reproduce " + std::string(BugKindName(bug->kind)) +
                           " at site " + std::to_string(bug->site));
    }
    out << "reproduced bug " << bug->id << "\n";
    return kExitOk;
  }
  const json as_json = InputToJson(prog, input);
  const std::string path = PathIdHex(ComputePathId(res.trace));
  for (const ReportEntry& e : report.corpus) {
    if (e.input != as_json) continue;
    if (e.path_id != path) {
      throw ReplayMismatch("input was recorded on path " + e.path_id + " but ran on " + path);
    }
    out << "matches corpus path " << e.path_id << "\n";
  }
  return kExitOk;
}

int RunBench(const CampaignOptions& o, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-16s | %4s %4s %5s %10s | %4s %4s %10s\n", "target", "P",
                "B", "R_L", "E", "P", "B", "E");
  out << "built-in targets: learning on | learning off\n" << line;
  for (const BuiltinTarget& t : BuiltinTargets()) {
    const TargetProgram prog = LoadBuiltin(t.name);
    CampaignOptions on_opts = o;
    on_opts.learning = "on";
    CampaignOptions off_opts = o;
    off_opts.learning = "off";
    const CampaignResult on = RunCampaign(prog, {}, MakeConfig(on_opts));
    const CampaignResult off = RunCampaign(prog, {}, MakeConfig(off_opts));
    std::snprintf(line, sizeof line, "%-16s | %4zu %4zu %5s %10llu | %4zu %4zu %10llu\n",
                  std::string(t.name).c_str(), on.corpus.size(), on.bugs.size(),
                  FormatRate(on.stats.learn_rate()).c_str(),
                  static_cast<unsigned long long>(on.stats.execs), off.corpus.size(),
                  off.bugs.size(), static_cast<unsigned long long>(off.stats.execs));
    out << line;
  }
  return kExitOk;
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Greybox fuzzer with input learning"};
  app.name("lfuzz");
  app.require_subcommand(1);

  std::string target;
  std::string out_dir;
  CampaignOptions fuzz_opts;
  CLI::App* fuzz = app.add_subcommand("fuzz", "Run one campaign");
  fuzz->add_option("target", target, "IR file or builtin:NAME")->required();
  fuzz->add_option("--out", out_dir, "Directory for report files");
  AddCampaignOptions(fuzz, fuzz_opts, true);

  CampaignOptions compare_opts;
  compare_opts.seed = 1;
  size_t trials = 20;
  CLI::App* compare =
      app.add_subcommand("compare", "Paired learning-on/off campaigns with matched seeds");
  compare->add_option("target", target, "IR file or builtin:NAME")->required();
  compare->add_option("--trials", trials, "Number of paired trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  AddCampaignOptions(compare, compare_opts, false);

  std::string report_file;
  std::optional<uint64_t> bug_id;
  std::string input_file;
  CLI::App* replay = app.add_subcommand("replay", "Re-execute a bug witness or an input");
  replay->add_option("report", report_file, "report.json of a campaign")->required();
  auto* bug_opt = replay->add_option("--bug", bug_id, "Bug id from the report");
  auto* input_opt =
      replay->add_option("--input", input_file, "Input file")->check(CLI::ExistingFile);
  bug_opt->excludes(input_opt);

  CampaignOptions bench_opts;
  CLI::App* bench = app.add_subcommand("bench", "Run every built-in target");
  AddCampaignOptions(bench, bench_opts, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fuzz) return RunFuzz(target, fuzz_opts, out_dir, out);
    if (*compare) return RunCompare(target, compare_opts, trials, out);
    if (*replay) {
      if (!*bug_opt && !*input_opt) throw UsageError("replay needs --bug or --input");
      return RunReplay(report_file, bug_id, input_file, out);
    }
    if (*bench) return RunBench(bench_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ReplayMismatch& e) {
    err << "replay mismatch: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace lfuzz
