#include "lfuzz/detectors.h"

#include <algorithm>
#include <array>

namespace lfuzz {

namespace {

constexpr std::array<std::string_view, 4> kBugKindNames = {
    "AssertionViolation", "PreconditionViolation", "CheckedArithError",
    "ArbitraryStorageWrite"};

}  // namespace

std::string_view BugKindName(BugKind kind) {
  return kBugKindNames[static_cast<size_t>(kind)];
}

std::optional<BugKind> BugKindFromName(std::string_view name) {
  for (size_t i = 0; i < kBugKindNames.size(); ++i) {
    if (kBugKindNames[i] == name) return static_cast<BugKind>(i);
  }
  return std::nullopt;
}

Detector::Detector(const TargetProgram& prog, DetectorOptions options)
    : options_(options) {
  for (const FunctionDef& fn : prog.functions) {
    for (const Stmt& s : fn.body) {
      if (const auto* req = std::get_if<stmt::Require>(&s.node); req && req->at_entry) {
        entry_requires_.insert(req->site);
      }
    }
  }
}

std::vector<Finding> Detector::Classify(const ExecutionResult& result,
                                        std::optional<uint64_t> probe) const {
  std::vector<Finding> out;
  auto add = [&out](Finding f) {
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  };
  for (const CallOutcome& o : result.outcomes) {
    switch (o.kind) {
      case OutcomeKind::kAssertFailed:
        add({BugKind::kAssertionViolation, o.site});
        break;
      case OutcomeKind::kRequireFailed:
        if (!(options_.ignore_entry_requires && entry_requires_.count(o.site))) {
          add({BugKind::kPreconditionViolation, o.site});
        }
        break;
      case OutcomeKind::kCheckedError:
        add({BugKind::kCheckedArithError, o.site});
        break;
      case OutcomeKind::kReturned:
      case OutcomeKind::kFuelExhausted:
        break;
    }
  }
  if (probe) {
    for (const StorageWrite& w : result.storage_writes) {
      if (w.address == *probe) add({BugKind::kArbitraryStorageWrite, w.site});
    }
  }
  return out;
}

bool BugLog::Add(const Finding& finding, const InputVector& witness, double seconds,
                 uint64_t exec) {
  if (!seen_.insert(finding).second) return false;
  bugs_.push_back({finding.kind, finding.site, witness, seconds, exec});
  return true;
}

bool BugLog::Contains(BugKind kind) const {
  return std::any_of(bugs_.begin(), bugs_.end(),
                     [kind](const Bug& b) { return b.kind == kind; });
}

}  // namespace lfuzz
