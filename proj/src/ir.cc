#include "lfuzz/ir.h"

#include <algorithm>

namespace lfuzz {

int64_t IntWidth::wrap(__int128 v) const {
  if (bits >= 64) return static_cast<int64_t>(static_cast<uint64_t>(v));
  const uint64_t mask = (uint64_t{1} << bits) - 1;
  uint64_t low = static_cast<uint64_t>(v) & mask;
  if (low & (uint64_t{1} << (bits - 1))) low |= ~mask;  // sign-extend
  return static_cast<int64_t>(low);
}

std::string_view CmpOpName(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "==";
    case CmpOp::kNe: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

bool EvalCmp(CmpOp op, int64_t l, int64_t r) {
  switch (op) {
    case CmpOp::kEq: return l == r;
    case CmpOp::kNe: return l != r;
    case CmpOp::kLt: return l < r;
    case CmpOp::kLe: return l <= r;
    case CmpOp::kGt: return l > r;
    case CmpOp::kGe: return l >= r;
  }
  return false;
}

CmpOp NegateCmp(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return CmpOp::kNe;
    case CmpOp::kNe: return CmpOp::kEq;
    case CmpOp::kLt: return CmpOp::kGe;
    case CmpOp::kLe: return CmpOp::kGt;
    case CmpOp::kGt: return CmpOp::kLe;
    case CmpOp::kGe: return CmpOp::kLt;
  }
  return op;
}

std::string_view SiteKindName(SiteKind kind) {
  switch (kind) {
    case SiteKind::kBranch: return "branch";
    case SiteKind::kLoop: return "loop";
    case SiteKind::kRequire: return "require";
    case SiteKind::kAssert: return "assert";
    case SiteKind::kStore: return "store";
    case SiteKind::kChecked: return "checked";
  }
  return "?";
}

std::optional<uint32_t> TargetProgram::FindFunction(
    std::string_view fn_name) const {
  for (uint32_t i = 0; i < functions.size(); ++i) {
    if (functions[i].name == fn_name) return i;
  }
  return std::nullopt;
}

size_t TargetProgram::CountSites(SiteKind kind) const {
  return std::count_if(sites.begin(), sites.end(),
                       [kind](const SiteInfo& s) { return s.kind == kind; });
}

bool TargetProgram::IsConditionSite(SiteId site) const {
  if (site >= sites.size()) return false;
  switch (sites[site].kind) {
    case SiteKind::kBranch:
    case SiteKind::kLoop:
    case SiteKind::kRequire:
    case SiteKind::kAssert:
      return true;
    default:
      return false;
  }
}

uint64_t Scramble(uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t ArrayBase(uint64_t slot) { return Scramble(slot ^ 0xa77a7ULL); }

}  // namespace lfuzz
