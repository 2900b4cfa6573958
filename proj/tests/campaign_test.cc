#include "lfuzz/campaign.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "lfuzz/benchmarks.h"
#include "lfuzz/interpreter.h"
#include "walkthrough_fixture.h"

namespace lfuzz {
namespace {

using testing::BarInput;
using testing::NonZeroByNumber;
using testing::RunWalkthrough;
using testing::WalkthroughMetric;
using testing::WalkthroughRows;

CampaignConfig Budget(uint64_t execs, uint64_t seed, bool learning = true) {
  CampaignConfig cfg;
  cfg.max_execs = execs;
  cfg.rng_seed = seed;
  cfg.learning_enabled = learning;
  return cfg;
}

TEST(Walkthrough, ReplaysEveryRow) {
  const TargetProgram bar = LoadBuiltin("bar");
  const testing::WalkthroughRun run = RunWalkthrough(bar);
  const auto& rows = WalkthroughRows();
  ASSERT_EQ(run.records.size(), rows.size());
  std::map<size_t, int> entry_test;
  for (size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    const ExecRecord& rec = run.records[k];
    SCOPED_TRACE("test " + std::to_string(row.test));
    EXPECT_EQ(rec.input, BarInput(row.a, row.b, row.c));
    EXPECT_EQ(Execute(bar, rec.input).outcomes.at(0).value, row.path);
    EXPECT_EQ(NonZeroByNumber(rec.costs), row.costs);
    if (row.from) {
      ASSERT_TRUE(rec.parent.has_value());
      EXPECT_EQ(entry_test.at(*rec.parent), *row.from);
    } else {
      EXPECT_FALSE(rec.parent.has_value());
    }
    if (row.learn_metric) {
      EXPECT_EQ(rec.learned_metric, WalkthroughMetric(*row.learn_metric));
    } else {
      EXPECT_FALSE(rec.learned_metric.has_value());
    }
    if (row.energy) EXPECT_EQ(rec.energy, *row.energy);
    if (rec.added_as) entry_test[*rec.added_as] = row.test;
  }
  EXPECT_TRUE(run.script_exhausted);
  EXPECT_EQ(run.result.stop_reason, StopReason::kTargetPaths);
  EXPECT_EQ(run.result.corpus.size(), 5u);
  EXPECT_EQ(run.result.stats.execs, 8u);
}

TEST(Walkthrough, LearnedInputsFollowTheirSource) {
  const testing::WalkthroughRun run = RunWalkthrough(LoadBuiltin("bar"));
  for (size_t k = 0; k + 1 < run.records.size(); ++k) {
    if (run.records[k].learned_metric) {
      EXPECT_EQ(run.records[k + 1].origin, ExecOrigin::kLearned) << k;
    }
  }
  std::vector<ExecOrigin> origins;
  for (const ExecRecord& r : run.records) origins.push_back(r.origin);
  EXPECT_EQ(origins, (std::vector<ExecOrigin>{
                         ExecOrigin::kSeed, ExecOrigin::kFuzzed, ExecOrigin::kLearned,
                         ExecOrigin::kLearned, ExecOrigin::kFuzzed, ExecOrigin::kLearned,
                         ExecOrigin::kFuzzed, ExecOrigin::kLearned}));
}

TEST(Campaign, ExecCountsReconcile) {
  const TargetProgram w = LoadBuiltin("wallet");
  uint64_t observed = 0, seeds = 0, learned = 0;
  CampaignHooks hooks;
  hooks.observer = [&](const ExecRecord& r) {
    ++observed;
    EXPECT_EQ(r.exec, observed);
    seeds += r.origin == ExecOrigin::kSeed;
    learned += r.origin == ExecOrigin::kLearned;
  };
  const CampaignResult r = RunCampaign(w, {}, Budget(5000, 3), hooks);
  EXPECT_EQ(r.stats.execs, 5000u);
  EXPECT_EQ(observed, r.stats.execs);
  EXPECT_EQ(r.stats.seed_execs, seeds);
  EXPECT_EQ(seeds, 1u);
  EXPECT_EQ(r.stats.learn_success + r.stats.learn_fail, learned);
  EXPECT_EQ(r.stop_reason, StopReason::kMaxExecs);
}

TEST(Campaign, LearningOffHasNoLearnEvents) {
  for (const char* name : {"bar", "wallet", "nested_eq"}) {
    const CampaignResult r = RunCampaign(LoadBuiltin(name), {}, Budget(20'000, 5, false));
    EXPECT_EQ(r.stats.learn_success + r.stats.learn_fail, 0u) << name;
    EXPECT_FALSE(r.stats.learn_rate().has_value());
    for (const Event& e : r.events) {
      EXPECT_NE(e.kind, EventKind::kLearnSuccess);
      EXPECT_NE(e.kind, EventKind::kLearnFail);
    }
  }
}

TEST(Campaign, SameSeedSameEventLog) {
  const TargetProgram w = LoadBuiltin("wallet");
  CampaignHooks h1, h2;
  h1.clock = [] { return 0.0; };
  h2.clock = [] { return 0.0; };
  const CampaignResult a = RunCampaign(w, {}, Budget(20'000, 9), h1);
  const CampaignResult b = RunCampaign(w, {}, Budget(20'000, 9), h2);
  EXPECT_EQ(EventLogToJsonLines(a.events), EventLogToJsonLines(b.events));
  EXPECT_EQ(a.probe_address, b.probe_address);
  const CampaignResult c = RunCampaign(w, {}, Budget(20'000, 10), h1);
  EXPECT_NE(EventLogToJsonLines(a.events), EventLogToJsonLines(c.events));
}

TEST(Campaign, CorpusAndCoverageGrowMonotonically) {
  size_t last = 0;
  CampaignHooks hooks;
  CampaignResult r = RunCampaign(LoadBuiltin("nested_eq"), {}, Budget(30'000, 2), hooks);
  for (const CoveragePoint& p : r.coverage) {
    EXPECT_GE(p.paths, last);
    last = p.paths;
  }
  EXPECT_EQ(last, r.corpus.size());
  // Every corpus entry replays onto its own path.
  const TargetProgram prog = LoadBuiltin("nested_eq");
  for (const CorpusEntry& e : r.corpus.entries()) {
    EXPECT_EQ(ComputePathId(Execute(prog, e.input).trace), e.path_id);
  }
}

TEST(Campaign, SeedsOnOnePathGiveOneEntry) {
  const TargetProgram bar = LoadBuiltin("bar");
  CampaignConfig cfg = Budget(2, 1);
  const CampaignResult r =
      RunCampaign(bar, {BarInput(-1, 0, -5), BarInput(-2, 1, -7)}, cfg);
  EXPECT_EQ(r.stats.seed_execs, 2u);
  EXPECT_EQ(r.corpus.size(), 1u);
}

TEST(Campaign, EmptyCallSeed) {
  const TargetProgram w = LoadBuiltin("wallet");
  const InputVector pop{{Call{*w.FindFunction("PopCode"), {}}}};
  const CampaignResult r = RunCampaign(w, {pop}, Budget(1, 1));
  EXPECT_EQ(r.corpus.size(), 1u);
  EXPECT_EQ(r.corpus.at(0).input, pop);
}

TEST(Campaign, ProbeAvoidsDeclaredSlots) {
  const TargetProgram w = LoadBuiltin("wallet");
  std::set<uint64_t> declared;
  for (const auto& s : w.storage) declared.insert(s.slot);
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    EXPECT_EQ(declared.count(DrawProbeAddress(w, rng)), 0u);
  }
  CampaignConfig cfg = Budget(10, 1);
  cfg.probe_address = 0xabc;
  EXPECT_EQ(RunCampaign(w, {}, cfg).probe_address, 0xabcu);
}

TEST(Campaign, StopConditions) {
  const TargetProgram bar = LoadBuiltin("bar");
  CampaignConfig none;
  EXPECT_THROW(RunCampaign(bar, {}, none), std::invalid_argument);

  CampaignConfig paths = Budget(1'000'000, 4);
  paths.target_paths = 3;
  const CampaignResult p = RunCampaign(bar, {}, paths);
  EXPECT_EQ(p.stop_reason, StopReason::kTargetPaths);
  EXPECT_EQ(p.corpus.size(), 3u);

  double now = 0;
  CampaignHooks hooks;
  hooks.clock = [&now] { return now += 0.001; };
  CampaignConfig timed;
  timed.time_limit_seconds = 1.0;
  const CampaignResult t = RunCampaign(bar, {}, timed, hooks);
  EXPECT_EQ(t.stop_reason, StopReason::kTimeLimit);
  EXPECT_LT(t.stats.execs, 1000u);

  const TargetProgram w = LoadBuiltin("wallet");
  CampaignConfig bug = Budget(1'000'000, 2001);
  bug.stop_on_bug = BugKind::kArbitraryStorageWrite;
  const CampaignResult b = RunCampaign(w, {}, bug);
  EXPECT_EQ(b.stop_reason, StopReason::kBugFound);
  EXPECT_TRUE(b.bugs.Contains(BugKind::kArbitraryStorageWrite));
}

TEST(Campaign, RejectsInvalidSeeds) {
  EXPECT_THROW(RunCampaign(LoadBuiltin("bar"), {BarInput(1, 2, int64_t{1} << 40)}, Budget(10, 1)),
               InputError);
}

TEST(EffectiveMaxCalls, StoragelessProgramsUseSingleCalls) {
  EXPECT_EQ(EffectiveMaxCalls(LoadBuiltin("bar"), 3), 1u);
  EXPECT_EQ(EffectiveMaxCalls(LoadBuiltin("wallet"), 3), 3u);
}

TEST(EventLog, JsonLinesShape) {
  Event e;
  e.seconds = 1.5;
  e.execs = 12;
  e.kind = EventKind::kLearnSuccess;
  e.path = PathId{0x10};
  e.metric = CostSiteId{3, CostDirection::kToTrue};
  const nlohmann::json j = EventToJson(e);
  EXPECT_EQ(j.at("event"), "LearnSuccess");
  EXPECT_EQ(j.at("execs"), 12);
  EXPECT_EQ(j.at("path"), "0x0000000000000010");
  EXPECT_EQ(j.at("metric"), "s3:T");
  const std::string lines = EventLogToJsonLines({e, e});
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
}

}  // namespace
}  // namespace lfuzz
