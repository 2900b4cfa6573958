#include "lfuzz/instrument.h"

#include <algorithm>
#include <cstdio>

namespace lfuzz {

std::string CostToString(Cost c) {
  if (c == 0) return "0";
  std::string out;
  while (c > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
    c /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string PathIdHex(PathId p) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(p.id));
  return buf;
}

namespace {

inline void FnvByte(uint64_t& h, uint8_t b) {
  h ^= b;
  h *= kFnvPrime;
}

}  // namespace

PathId ComputePathId(const BranchTrace& trace) {
  uint64_t h = kFnvOffsetBasis;
  for (const TraceEvent& e : trace.events) {
    if (e.kind == TraceEvent::Kind::kBranch) {
      FnvByte(h, 0x01);
      for (int shift = 0; shift < 32; shift += 8) {
        FnvByte(h, static_cast<uint8_t>(e.site >> shift));
      }
      FnvByte(h, e.taken ? 1 : 0);
    } else {
      FnvByte(h, 0x02);
      FnvByte(h, static_cast<uint8_t>(e.outcome));
    }
  }
  return PathId{h};
}

std::string CostSiteName(CostSiteId id) {
  static constexpr char kDir[] = {'F', 'T', 'W'};
  return "s" + std::to_string(id.site) + ":" + kDir[static_cast<int>(id.direction)];
}

BranchCostPair BranchCosts(CmpOp op, int64_t l, int64_t r) {
  const __int128 a = l;
  const __int128 b = r;
  auto abs_diff = [&] { return static_cast<Cost>(a > b ? a - b : b - a); };
  auto c_eq = [&]() -> Cost { return a == b ? 1 : 0; };
  auto c_eq_bar = [&]() -> Cost { return a == b ? 0 : abs_diff(); };
  auto c_lt = [&]() -> Cost { return a < b ? static_cast<Cost>(b - a) : 0; };
  auto c_lt_bar = [&]() -> Cost { return a < b ? 0 : static_cast<Cost>(a - b + 1); };
  auto c_le = [&]() -> Cost { return a <= b ? static_cast<Cost>(b - a + 1) : 0; };
  auto c_le_bar = [&]() -> Cost { return a <= b ? 0 : static_cast<Cost>(a - b); };
  switch (op) {
    case CmpOp::kEq: return {c_eq(), c_eq_bar()};
    case CmpOp::kNe: return {c_eq_bar(), c_eq()};
    case CmpOp::kLt: return {c_lt(), c_lt_bar()};
    case CmpOp::kLe: return {c_le(), c_le_bar()};
    case CmpOp::kGt: return {c_le_bar(), c_le()};
    case CmpOp::kGe: return {c_lt_bar(), c_lt()};
  }
  return {0, 0};
}

Cost StorageCost(uint64_t lhs_addr, uint64_t probe_addr) {
  return lhs_addr > probe_addr ? lhs_addr - probe_addr : probe_addr - lhs_addr;
}

void CostVector::Record(CostSiteId site, Cost cost) {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), site,
      [](const Entry& e, CostSiteId key) { return e.first < key; });
  if (it != entries_.end() && it->first == site) {
    it->second = std::min(it->second, cost);
  } else {
    entries_.insert(it, Entry{site, cost});
  }
}

std::optional<Cost> CostVector::Get(CostSiteId site) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), site,
      [](const Entry& e, CostSiteId key) { return e.first < key; });
  if (it != entries_.end() && it->first == site) return it->second;
  return std::nullopt;
}

}  // namespace lfuzz
