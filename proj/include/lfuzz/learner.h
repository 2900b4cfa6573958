// Input learning from two executions.
//
// Given an input and a mutant that differ in exactly one integer slot, the
// learner picks a cost metric observed (non-zero, and different) in both
// executions, fits the line c(i) = m*i + k through the two (value, cost)
// points and proposes the value where the line crosses zero.
#ifndef LFUZZ_LEARNER_H_
#define LFUZZ_LEARNER_H_

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "lfuzz/input.h"
#include "lfuzz/instrument.h"
#include "lfuzz/ir.h"
#include "lfuzz/rng.h"

namespace lfuzz {

struct LearnSample {
  int64_t i0 = 0;
  int64_t i1 = 0;
  Cost c0 = 0;
  Cost c1 = 0;
  CostSiteId metric;
};

// The slot in which a and b differ, if they have identical shape and differ
// in exactly one slot.
std::optional<ParamKey> DiffSingleParam(const InputVector& a, const InputVector& b);

// Metrics present in both vectors with both costs > 0 and unequal, sorted.
std::vector<CostSiteId> QualifyingMetrics(const CostVector& cost0,
                                          const CostVector& cost1);

// Uniform choice among QualifyingMetrics.
std::optional<CostSiteId> SelectMetric(const CostVector& cost0,
                                       const CostVector& cost1, Rng& rng);

// Zero crossing of the line through (i0, c0) and (i1, c1), computed exactly
// and rounded half away from zero. A crossing outside `width` is reduced
// modulo 2^bits (two's complement), matching how the machine truncates
// integers. Returns nullopt for a degenerate line or when an intermediate
// leaves the signed 128-bit range.
std::optional<int64_t> FitAndSolve(const LearnSample& sample, IntWidth width = {});

// Metrics whose cost has been driven to zero by some execution; used by the
// rarest-site metric strategy.
class FlipCoverage {
 public:
  void Observe(const CostVector& costs);
  bool Seen(CostSiteId metric) const { return zeroed_.count(metric) > 0; }
  size_t size() const { return zeroed_.size(); }

 private:
  std::set<CostSiteId> zeroed_;
};

enum class MetricStrategy { kRandom, kRarestSite };

// Picks one metric from a non-empty candidate list.
using MetricChooser = std::function<CostSiteId(std::span<const CostSiteId>)>;

MetricChooser RandomMetricChooser(Rng& rng);
// Prefers candidates never seen at zero cost; uniform among the preferred
// set, or among all candidates when every one has been seen.
MetricChooser RarestSiteChooser(Rng& rng, const FlipCoverage& coverage);

// Values already proposed during the current energy loop, keyed by
// (slot, metric). Cleared whenever a new corpus input is picked.
class LearnHistory {
 public:
  bool Contains(ParamKey key, CostSiteId metric, int64_t value) const {
    return tried_.count({key, metric, value}) > 0;
  }
  void Insert(ParamKey key, CostSiteId metric, int64_t value) {
    tried_.insert({key, metric, value});
  }
  void Clear() { tried_.clear(); }

 private:
  std::set<std::tuple<ParamKey, CostSiteId, int64_t>> tried_;
};

struct LearnedInput {
  InputVector input;
  CostSiteId metric;
  ParamKey key;
};

// Learn(input, cost, input', cost'): returns a copy of `input` whose
// differing slot is replaced by the learned value. Returns nullopt when the
// inputs do not differ in exactly one slot, no metric qualifies, the line is
// degenerate, the value equals either sample or was already tried.
std::optional<LearnedInput> Learn(const TargetProgram& prog, const InputVector& input,
                                  const CostVector& cost,
                                  const InputVector& mutant,
                                  const CostVector& mutant_cost,
                                  const MetricChooser& choose,
                                  LearnHistory* history = nullptr);

}  // namespace lfuzz

#endif  // LFUZZ_LEARNER_H_
