// Bug oracles over execution results.
#ifndef LFUZZ_DETECTORS_H_
#define LFUZZ_DETECTORS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "lfuzz/input.h"
#include "lfuzz/interpreter.h"
#include "lfuzz/ir.h"

namespace lfuzz {

enum class BugKind : uint8_t {
  kAssertionViolation,
  kPreconditionViolation,
  kCheckedArithError,
  kArbitraryStorageWrite,
};

std::string_view BugKindName(BugKind kind);
std::optional<BugKind> BugKindFromName(std::string_view name);

struct Finding {
  BugKind kind;
  SiteId site;
  friend bool operator==(const Finding&, const Finding&) = default;
  friend auto operator<=>(const Finding&, const Finding&) = default;
};

struct DetectorOptions {
  // Skip require failures in the leading requires of a function body.
  bool ignore_entry_requires = false;
};

class Detector {
 public:
  Detector(const TargetProgram& prog, DetectorOptions options);

  // Findings for one execution, in call order, without duplicates. Writes
  // equal to `probe` count even if their call was later reverted.
  std::vector<Finding> Classify(const ExecutionResult& result,
                                std::optional<uint64_t> probe) const;

 private:
  DetectorOptions options_;
  std::set<SiteId> entry_requires_;
};

struct Bug {
  BugKind kind;
  SiteId site;
  InputVector witness;
  double first_seen_seconds = 0;
  uint64_t first_seen_exec = 0;
};

// Keeps the first witness per (kind, site).
class BugLog {
 public:
  // Returns true if the finding is new.
  bool Add(const Finding& finding, const InputVector& witness, double seconds,
           uint64_t exec);
  const std::vector<Bug>& bugs() const { return bugs_; }
  size_t size() const { return bugs_.size(); }
  bool Contains(BugKind kind) const;

 private:
  std::vector<Bug> bugs_;
  std::set<Finding> seen_;
};

}  // namespace lfuzz

#endif  // LFUZZ_DETECTORS_H_
