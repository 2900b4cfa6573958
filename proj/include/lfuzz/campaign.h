// Campaign engine: coverage-guided fuzzing with an optional learning step.
//
// With learning enabled, every mutant is compared against the input it was
// derived from. When the two differ in one slot the learner may propose a
// value, which is executed next (even past the loop's energy bound). With
// learning disabled the loop is plain pick / mutate / run.
#ifndef LFUZZ_CAMPAIGN_H_
#define LFUZZ_CAMPAIGN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfuzz/corpus.h"
#include "lfuzz/detectors.h"
#include "lfuzz/input.h"
#include "lfuzz/instrument.h"
#include "lfuzz/interpreter.h"
#include "lfuzz/learner.h"
#include "lfuzz/mutator.h"
#include "lfuzz/rng.h"

namespace lfuzz {

// Seconds elapsed since the campaign started.
using Clock = std::function<double()>;

// A monotonic clock that starts at zero on construction.
Clock SteadyClock();

struct CampaignConfig {
  uint64_t rng_seed = 0;
  bool learning_enabled = true;
  // Stop conditions, checked before every execution. Zero/empty = unbounded.
  uint64_t max_execs = 0;
  std::optional<double> time_limit_seconds;
  std::optional<size_t> target_paths;
  std::optional<BugKind> stop_on_bug;

  size_t max_calls = 3;
  MutationWeights mutation;
  MetricStrategy metric_strategy = MetricStrategy::kRandom;
  PickStrategy pick_strategy = PickStrategy::kUniform;
  EnergySchedule energy;
  std::optional<uint64_t> probe_address;
  ExecConfig exec;
  DetectorOptions detector;
};

// Choices the campaign delegates; the default draws from the campaign RNG.
class Decisions {
 public:
  virtual ~Decisions() = default;
  virtual size_t PickEntry(const Corpus& corpus) = 0;
  virtual InputVector Mutate(const InputVector& input) = 0;
  virtual CostSiteId ChooseMetric(std::span<const CostSiteId> candidates,
                                  const FlipCoverage& coverage) = 0;
};

class RandomDecisions : public Decisions {
 public:
  RandomDecisions(Rng& rng, const Mutator& mutator, PickStrategy pick,
                  MetricStrategy metric)
      : rng_(rng), mutator_(mutator), pick_(pick), metric_(metric) {}

  size_t PickEntry(const Corpus& corpus) override;
  InputVector Mutate(const InputVector& input) override;
  CostSiteId ChooseMetric(std::span<const CostSiteId> candidates,
                          const FlipCoverage& coverage) override;

 private:
  Rng& rng_;
  const Mutator& mutator_;
  PickStrategy pick_;
  MetricStrategy metric_;
};

enum class ExecOrigin : uint8_t { kSeed, kFuzzed, kLearned };
std::string_view ExecOriginName(ExecOrigin origin);

// One execution as seen by an observer.
struct ExecRecord {
  uint64_t exec = 0;  // 1-based
  ExecOrigin origin = ExecOrigin::kSeed;
  // Corpus index of the picked input this execution was derived from.
  std::optional<size_t> parent;
  InputVector input;
  PathId path;
  CostVector costs;
  // Corpus index when this execution discovered a new path.
  std::optional<size_t> added_as;
  // Loop energy when the execution ran; zero for seeds.
  uint64_t energy = 0;
  // Metric the learner used to derive the next input from this one.
  std::optional<CostSiteId> learned_metric;
};

using ExecObserver = std::function<void(const ExecRecord&)>;

enum class EventKind : uint8_t { kNewPath, kBug, kLearnSuccess, kLearnFail };
std::string_view EventKindName(EventKind kind);

struct Event {
  double seconds = 0;
  uint64_t execs = 0;
  EventKind kind = EventKind::kNewPath;
  PathId path;
  std::optional<Finding> bug;
  std::optional<CostSiteId> metric;
};

nlohmann::json EventToJson(const Event& e);
// One JSON object per line.
std::string EventLogToJsonLines(const std::vector<Event>& events);

struct CoveragePoint {
  double seconds = 0;
  uint64_t execs = 0;
  size_t paths = 0;
};

enum class StopReason : uint8_t { kMaxExecs, kTimeLimit, kTargetPaths, kBugFound };
std::string_view StopReasonName(StopReason reason);

struct CampaignStats {
  uint64_t execs = 0;
  uint64_t seed_execs = 0;
  uint64_t learn_success = 0;
  uint64_t learn_fail = 0;
  double seconds = 0;

  std::optional<double> learn_rate() const {
    const uint64_t total = learn_success + learn_fail;
    if (total == 0) return std::nullopt;
    return static_cast<double>(learn_success) / static_cast<double>(total);
  }
};

struct CampaignResult {
  Corpus corpus;
  BugLog bugs;
  CampaignStats stats;
  std::vector<Event> events;
  std::vector<CoveragePoint> coverage;
  uint64_t probe_address = 0;
  StopReason stop_reason = StopReason::kMaxExecs;
};

// Draws an address from `rng` over all 64-bit values, skipping the
// program's declared storage slots.
uint64_t DrawProbeAddress(const TargetProgram& prog, Rng& rng);

// Calls cannot influence each other in a program without storage, so its
// inputs are single calls; otherwise max_calls.
size_t EffectiveMaxCalls(const TargetProgram& prog, size_t max_calls);

struct CampaignHooks {
  // Overrides the random choices; must outlive the call.
  Decisions* decisions = nullptr;
  ExecObserver observer;
  Clock clock;
  // Replaces the energy schedule with a fixed per-loop bound.
  std::optional<uint64_t> fixed_max_energy;
};

// Runs a campaign. With no seeds, one seed is synthesized from the RNG.
// A campaign without any stop condition never returns; throws
// std::invalid_argument when none is set, and InputError for bad seeds.
CampaignResult RunCampaign(const TargetProgram& prog,
                           const std::vector<InputVector>& seeds,
                           const CampaignConfig& cfg, CampaignHooks hooks = {});

}  // namespace lfuzz

#endif  // LFUZZ_CAMPAIGN_H_
