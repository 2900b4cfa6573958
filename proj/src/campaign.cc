#include "lfuzz/campaign.h"

#include <chrono>
#include <set>
#include <stdexcept>

namespace lfuzz {

Clock SteadyClock() {
  const auto start = std::chrono::steady_clock::now();
  return [start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
}

size_t RandomDecisions::PickEntry(const Corpus& corpus) {
  return ChooseEntry(corpus, rng_, pick_);
}

InputVector RandomDecisions::Mutate(const InputVector& input) {
  return mutator_.Mutate(input, rng_);
}

CostSiteId RandomDecisions::ChooseMetric(std::span<const CostSiteId> candidates,
                                         const FlipCoverage& coverage) {
  if (metric_ == MetricStrategy::kRarestSite) {
    return RarestSiteChooser(rng_, coverage)(candidates);
  }
  return candidates[rng_.Below(candidates.size())];
}

std::string_view ExecOriginName(ExecOrigin origin) {
  switch (origin) {
    case ExecOrigin::kSeed: return "seed";
    case ExecOrigin::kFuzzed: return "fuzzed";
    case ExecOrigin::kLearned: return "learned";
  }
  return "?";
}

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kNewPath: return "NewPath";
    case EventKind::kBug: return "Bug";
    case EventKind::kLearnSuccess: return "LearnSuccess";
    case EventKind::kLearnFail: return "LearnFail";
  }
  return "?";
}

std::string_view StopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxExecs: return "max_execs";
    case StopReason::kTimeLimit: return "time_limit";
    case StopReason::kTargetPaths: return "target_paths";
    case StopReason::kBugFound: return "bug_found";
  }
  return "?";
}

nlohmann::json EventToJson(const Event& e) {
  nlohmann::json j = {{"t", e.seconds},
                      {"execs", e.execs},
                      {"event", EventKindName(e.kind)},
                      {"path", PathIdHex(e.path)}};
  if (e.bug) {
    j["kind"] = BugKindName(e.bug->kind);
    j["site"] = e.bug->site;
  }
  if (e.metric) j["metric"] = CostSiteName(*e.metric);
  return j;
}

std::string EventLogToJsonLines(const std::vector<Event>& events) {
  std::string out;
  for (const Event& e : events) {
    out += EventToJson(e).dump();
    out += '\n';
  }
  return out;
}

uint64_t DrawProbeAddress(const TargetProgram& prog, Rng& rng) {
  std::set<uint64_t> declared;
  for (const StorageDecl& d : prog.storage) declared.insert(d.slot);
  uint64_t probe;
  do {
    probe = rng.Next();
  } while (declared.count(probe));
  return probe;
}

size_t EffectiveMaxCalls(const TargetProgram& prog, size_t max_calls) {
  return prog.storage.empty() ? 1 : max_calls;
}

namespace {

class Campaign {
 public:
  Campaign(const TargetProgram& prog, const CampaignConfig& cfg, CampaignHooks hooks)
      : prog_(prog),
        cfg_(cfg),
        hooks_(std::move(hooks)),
        rng_(cfg.rng_seed),
        mutator_(prog, cfg.mutation, EffectiveMaxCalls(prog, cfg.max_calls)),
        detector_(prog, cfg.detector),
        default_decisions_(rng_, mutator_, cfg.pick_strategy, cfg.metric_strategy),
        decisions_(hooks_.decisions ? hooks_.decisions : &default_decisions_),
        clock_(hooks_.clock ? hooks_.clock : SteadyClock()) {
    if (cfg.max_execs == 0 && !cfg.time_limit_seconds && !cfg.target_paths &&
        !cfg.stop_on_bug) {
      throw std::invalid_argument("campaign has no stop condition");
    }
    exec_cfg_ = cfg.exec;
    result_.probe_address = cfg.probe_address ? *cfg.probe_address
                                              : DrawProbeAddress(prog, rng_);
    exec_cfg_.probe_address = result_.probe_address;
  }

  CampaignResult Run(const std::vector<InputVector>& seeds) {
    std::vector<InputVector> initial = seeds;
    if (initial.empty()) initial.push_back(mutator_.SeedInput(rng_));
    for (const InputVector& s : initial) ValidateInput(prog_, s);

    for (const InputVector& s : initial) {
      if (ShouldStop()) return Finish();
      ExecRecord rec = Exec(s, ExecOrigin::kSeed, std::nullopt, 0);
      ++result_.stats.seed_execs;
      Notify(rec);
    }

    while (!result_.corpus.empty() && !ShouldStop()) {
      const size_t picked = decisions_->PickEntry(result_.corpus);
      CorpusEntry& entry = result_.corpus.at(picked);
      const uint64_t max_energy = hooks_.fixed_max_energy
                                      ? *hooks_.fixed_max_energy
                                      : cfg_.energy.MaxEnergy(entry.pick_count);
      ++entry.pick_count;
      // The corpus may grow (and reallocate) during the loop.
      const InputVector input = entry.input;
      const CostVector cost = entry.costs;

      uint64_t energy = 0;
      std::optional<LearnedInput> learned;
      history_.Clear();
      while (energy < max_energy || learned) {
        if (ShouldStop()) return Finish();
        std::optional<CostSiteId> target;
        InputVector mutant;
        ExecOrigin origin = ExecOrigin::kFuzzed;
        if (learned) {
          mutant = std::move(learned->input);
          target = learned->metric;
          origin = ExecOrigin::kLearned;
          learned.reset();
        } else {
          mutant = decisions_->Mutate(input);
        }
        ExecRecord rec = Exec(mutant, origin, picked, energy);
        if (target) RecordLearnOutcome(rec, *target);

        if (cfg_.learning_enabled && energy < max_energy && !ShouldStop()) {
          MetricChooser choose = [this](std::span<const CostSiteId> c) {
            return decisions_->ChooseMetric(c, coverage_);
          };
          learned = Learn(prog_, input, cost, rec.input, rec.costs, choose, &history_);
          if (learned) rec.learned_metric = learned->metric;
        }
        Notify(rec);
        ++energy;
      }
    }
    return Finish();
  }

 private:
  double Now() const { return clock_(); }

  bool ShouldStop() {
    if (cfg_.max_execs && result_.stats.execs >= cfg_.max_execs) {
      result_.stop_reason = StopReason::kMaxExecs;
      return true;
    }
    if (cfg_.target_paths && result_.corpus.size() >= *cfg_.target_paths) {
      result_.stop_reason = StopReason::kTargetPaths;
      return true;
    }
    if (cfg_.stop_on_bug && result_.bugs.Contains(*cfg_.stop_on_bug)) {
      result_.stop_reason = StopReason::kBugFound;
      return true;
    }
    if (cfg_.time_limit_seconds && Now() >= *cfg_.time_limit_seconds) {
      result_.stop_reason = StopReason::kTimeLimit;
      return true;
    }
    return false;
  }

  ExecRecord Exec(const InputVector& input, ExecOrigin origin,
                  std::optional<size_t> parent, uint64_t energy) {
    ExecutionResult res = Execute(prog_, input, exec_cfg_);
    const uint64_t exec = ++result_.stats.execs;
    const double now = Now();

    ExecRecord rec;
    rec.exec = exec;
    rec.origin = origin;
    rec.parent = parent;
    rec.input = input;
    rec.path = ComputePathId(res.trace);
    rec.costs = std::move(res.costs);
    rec.energy = energy;
    coverage_.Observe(rec.costs);

    if (!result_.corpus.Contains(rec.path)) {
      rec.added_as = result_.corpus.size();
      result_.corpus.Add({rec.path, input, rec.costs, 0, exec, now});
      result_.events.push_back({now, exec, EventKind::kNewPath, rec.path, {}, {}});
      result_.coverage.push_back({now, exec, result_.corpus.size()});
    }
    for (const Finding& f : detector_.Classify(res, result_.probe_address)) {
      if (result_.bugs.Add(f, input, now, exec)) {
        result_.events.push_back({now, exec, EventKind::kBug, rec.path, f, {}});
      }
    }
    return rec;
  }

  void RecordLearnOutcome(const ExecRecord& rec, CostSiteId target) {
    const auto cost = rec.costs.Get(target);
    const bool success = cost && *cost == 0;
    if (success) {
      ++result_.stats.learn_success;
    } else {
      ++result_.stats.learn_fail;
    }
    result_.events.push_back({Now(), rec.exec,
                              success ? EventKind::kLearnSuccess : EventKind::kLearnFail,
                              rec.path, std::nullopt, target});
  }

  void Notify(const ExecRecord& rec) {
    if (hooks_.observer) hooks_.observer(rec);
  }

  CampaignResult Finish() {
    result_.stats.seconds = Now();
    return std::move(result_);
  }

  const TargetProgram& prog_;
  const CampaignConfig& cfg_;
  CampaignHooks hooks_;
  Rng rng_;
  Mutator mutator_;
  Detector detector_;
  RandomDecisions default_decisions_;
  Decisions* decisions_;
  Clock clock_;
  ExecConfig exec_cfg_;
  FlipCoverage coverage_;
  LearnHistory history_;
  CampaignResult result_;
};

}  // namespace

CampaignResult RunCampaign(const TargetProgram& prog,
                           const std::vector<InputVector>& seeds,
                           const CampaignConfig& cfg, CampaignHooks hooks) {
  Campaign campaign(prog, cfg, std::move(hooks));
  return campaign.Run(seeds);
}

}  // namespace lfuzz
