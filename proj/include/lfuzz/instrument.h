// Execution instrumentation: whole-path identifiers and the cost metrics
// evaluated before every condition and every storage write.
#ifndef LFUZZ_INSTRUMENT_H_
#define LFUZZ_INSTRUMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lfuzz/ir.h"

namespace lfuzz {

// Costs may reach 2^64 (e.g. C_le(INT64_MIN, INT64_MAX)), so they are kept
// in 128 bits.
using Cost = unsigned __int128;

std::string CostToString(Cost c);

enum class OutcomeKind : uint8_t {
  kReturned = 0,
  kRequireFailed = 1,
  kAssertFailed = 2,
  kCheckedError = 3,
  kFuelExhausted = 4,
};

struct TraceEvent {
  enum class Kind : uint8_t { kBranch, kCallEnd } kind;
  SiteId site = 0;
  bool taken = false;
  OutcomeKind outcome = OutcomeKind::kReturned;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Sequence of branch decisions across the whole transaction sequence,
// with one kCallEnd marker per executed call.
struct BranchTrace {
  std::vector<TraceEvent> events;

  void AddBranch(SiteId site, bool taken) {
    events.push_back({TraceEvent::Kind::kBranch, site, taken, OutcomeKind::kReturned});
  }
  void AddCallEnd(OutcomeKind outcome) {
    events.push_back({TraceEvent::Kind::kCallEnd, 0, false, outcome});
  }
  friend bool operator==(const BranchTrace&, const BranchTrace&) = default;
};

struct PathId {
  uint64_t id = 0;
  friend bool operator==(PathId, PathId) = default;
  friend auto operator<=>(PathId, PathId) = default;
};

std::string PathIdHex(PathId p);

inline constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

// FNV-1a over the encoded event stream. Each branch event contributes
// tag 0x01, the site as 4 little-endian bytes and the taken flag; each call
// end contributes tag 0x02 and the outcome kind. The empty trace hashes to
// kFnvOffsetBasis.
PathId ComputePathId(const BranchTrace& trace);

enum class CostDirection : uint8_t { kToFalse = 0, kToTrue = 1, kWrite = 2 };

struct CostSiteId {
  SiteId site = 0;
  CostDirection direction = CostDirection::kToFalse;
  friend bool operator==(CostSiteId, CostSiteId) = default;
  friend auto operator<=>(CostSiteId, CostSiteId) = default;
};

// "s3:F", "s3:T", "s7:W"
std::string CostSiteName(CostSiteId id);

struct BranchCostPair {
  Cost to_false;
  Cost to_true;
  friend bool operator==(const BranchCostPair&, const BranchCostPair&) = default;
};

// Distance of `l op r` from flipping. Exactly one side is zero: the one
// matching the condition's current truth value.
//   eq: C_eq  = 1 if l == r        C'_eq = |l - r| if l != r
//   lt: C_lt  = r - l if l < r     C'_lt = l - r + 1 if l >= r
//   le: C_le  = r - l + 1 if l<=r  C'_le = l - r if l > r
//   ne, gt, ge reuse the above: ne = (C'_eq, C_eq), gt = (C'_le, C_le),
//   ge = (C'_lt, C_lt) as (to_false, to_true).
BranchCostPair BranchCosts(CmpOp op, int64_t l, int64_t r);

// |lhs_addr - probe_addr| over the unbounded integers.
Cost StorageCost(uint64_t lhs_addr, uint64_t probe_addr);

// Minimum observed cost per cost site along one execution. Absent key means
// the site was not reached.
class CostVector {
 public:
  using Entry = std::pair<CostSiteId, Cost>;

  // Keeps the minimum of the existing and the new cost.
  void Record(CostSiteId site, Cost cost);
  std::optional<Cost> Get(CostSiteId site) const;
  bool Contains(CostSiteId site) const { return Get(site).has_value(); }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // Sorted by CostSiteId.
  const std::vector<Entry>& entries() const { return entries_; }

  friend bool operator==(const CostVector&, const CostVector&) = default;

 private:
  std::vector<Entry> entries_;
};

}  // namespace lfuzz

#endif  // LFUZZ_INSTRUMENT_H_
