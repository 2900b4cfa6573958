#include "lfuzz/detectors.h"

#include <gtest/gtest.h>

#include <set>

#include "lfuzz/benchmarks.h"
#include "lfuzz/interpreter.h"
#include "lfuzz/parser.h"

namespace lfuzz {
namespace {

InputVector One(uint32_t fn, std::vector<int64_t> args) {
  return InputVector{{Call{fn, std::move(args)}}};
}

std::vector<Finding> Classify(const TargetProgram& p, const InputVector& in,
                              std::optional<uint64_t> probe = std::nullopt,
                              DetectorOptions opts = {}) {
  ExecConfig cfg;
  cfg.probe_address = probe;
  return Detector(p, opts).Classify(Execute(p, in, cfg), probe);
}

InputVector WalletExploit(const TargetProgram& w, uint64_t target) {
  const uint64_t length_slot = w.storage.at(1).slot;
  const int64_t i = static_cast<int64_t>(target - ArrayBase(length_slot));
  return InputVector{{Call{*w.FindFunction("PopCode"), {}},
                      Call{*w.FindFunction("SetCodeAt"), {i, 1}}}};
}

TEST(BugKind, NamesRoundTrip) {
  for (BugKind k : {BugKind::kAssertionViolation, BugKind::kPreconditionViolation,
                    BugKind::kCheckedArithError, BugKind::kArbitraryStorageWrite}) {
    EXPECT_EQ(BugKindFromName(BugKindName(k)), k);
  }
  EXPECT_EQ(BugKindName(BugKind::kArbitraryStorageWrite), "ArbitraryStorageWrite");
  EXPECT_EQ(BugKindFromName("Nope"), std::nullopt);
}

TEST(Detector, WalletExploitWritesProbe) {
  const TargetProgram w = LoadBuiltin("wallet");
  const uint64_t probe = 0x123456789abcdefULL;
  const auto findings = Classify(w, WalletExploit(w, probe), probe);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].kind, BugKind::kArbitraryStorageWrite);
  // Same input without a probe, or with a different probe, finds nothing.
  EXPECT_TRUE(Classify(w, WalletExploit(w, probe)).empty());
  EXPECT_TRUE(Classify(w, WalletExploit(w, probe), probe + 1).empty());
}

TEST(Detector, RevertedProbeWriteStillCounts) {
  const TargetProgram p =
      ParseProgram("fn f(a) { storage[a] = 1; assert(a < 100); return 0; }");
  std::set<BugKind> kinds;
  for (const Finding& f : Classify(p, One(0, {500}), 500)) kinds.insert(f.kind);
  EXPECT_EQ(kinds, (std::set<BugKind>{BugKind::kAssertionViolation,
                                      BugKind::kArbitraryStorageWrite}));
}

TEST(Detector, CleanBarHasNoFindings) {
  const TargetProgram bar = LoadBuiltin("bar");
  for (auto args : std::vector<std::vector<int64_t>>{
           {-1, 0, -5}, {42, 3, -5}, {7, 3, -5}, {-1, 6, -5}, {-1, 6, 42}}) {
    EXPECT_TRUE(Classify(bar, One(0, args), 99).empty());
  }
}

TEST(Detector, OutcomeMapping) {
  const TargetProgram p = ParseProgram(
      "fn f(a, b) { require(a > 0); assert(a != 5); return a / b; }");
  auto kind_of = [&](int64_t a, int64_t b) {
    const auto f = Classify(p, One(0, {a, b}));
    return f.empty() ? std::nullopt : std::optional<BugKind>(f.at(0).kind);
  };
  EXPECT_EQ(kind_of(0, 1), BugKind::kPreconditionViolation);
  EXPECT_EQ(kind_of(5, 1), BugKind::kAssertionViolation);
  EXPECT_EQ(kind_of(6, 0), BugKind::kCheckedArithError);
  EXPECT_EQ(kind_of(6, 2), std::nullopt);
}

TEST(Detector, IgnoreEntryRequires) {
  const TargetProgram p =
      ParseProgram("fn f(a) { require(a > 0); let b = a - 10; require(b > 0); return b; }");
  DetectorOptions ignore;
  ignore.ignore_entry_requires = true;
  EXPECT_TRUE(Classify(p, One(0, {0}), std::nullopt, ignore).empty());
  ASSERT_EQ(Classify(p, One(0, {5}), std::nullopt, ignore).size(), 1u);
  EXPECT_EQ(Classify(p, One(0, {0})).size(), 1u);
}

TEST(Detector, DeduplicatesWithinOneExecution) {
  const TargetProgram p = ParseProgram("fn f(a) { assert(a < 3); return 0; }");
  const InputVector in{{Call{0, {5}}, Call{0, {6}}, Call{0, {1}}}};
  EXPECT_EQ(Classify(p, in).size(), 1u);
}

TEST(Detector, WitnessReplays) {
  const TargetProgram w = LoadBuiltin("wallet");
  const uint64_t probe = 77;
  BugLog log;
  const InputVector witness = WalletExploit(w, probe);
  for (const Finding& f : Classify(w, witness, probe)) log.Add(f, witness, 1.5, 10);
  ASSERT_EQ(log.size(), 1u);
  const Bug& bug = log.bugs()[0];
  EXPECT_EQ(bug.first_seen_exec, 10u);
  EXPECT_DOUBLE_EQ(bug.first_seen_seconds, 1.5);
  const auto again = Classify(w, bug.witness, probe);
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0], (Finding{bug.kind, bug.site}));
}

TEST(BugLog, KeepsFirstWitnessPerKindAndSite) {
  BugLog log;
  const InputVector a{{Call{0, {1}}}}, b{{Call{0, {2}}}};
  EXPECT_TRUE(log.Add({BugKind::kAssertionViolation, 3}, a, 1, 1));
  EXPECT_FALSE(log.Add({BugKind::kAssertionViolation, 3}, b, 2, 2));
  EXPECT_TRUE(log.Add({BugKind::kAssertionViolation, 4}, b, 3, 3));
  EXPECT_TRUE(log.Add({BugKind::kCheckedArithError, 3}, b, 4, 4));
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log.bugs()[0].witness, a);
  EXPECT_TRUE(log.Contains(BugKind::kCheckedArithError));
  EXPECT_FALSE(log.Contains(BugKind::kArbitraryStorageWrite));
}

}  // namespace
}  // namespace lfuzz
