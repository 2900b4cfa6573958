#include "lfuzz/learner.h"

namespace lfuzz {

std::optional<ParamKey> DiffSingleParam(const InputVector& a, const InputVector& b) {
  if (a.calls.size() != b.calls.size()) return std::nullopt;
  std::optional<ParamKey> found;
  for (uint32_t c = 0; c < a.calls.size(); ++c) {
    const Call& ca = a.calls[c];
    const Call& cb = b.calls[c];
    if (ca.function != cb.function || ca.args.size() != cb.args.size()) {
      return std::nullopt;
    }
    for (uint32_t i = 0; i < ca.args.size(); ++i) {
      if (ca.args[i] == cb.args[i]) continue;
      if (found) return std::nullopt;
      found = ParamKey{c, i};
    }
  }
  return found;
}

std::vector<CostSiteId> QualifyingMetrics(const CostVector& cost0,
                                          const CostVector& cost1) {
  std::vector<CostSiteId> out;
  const auto& a = cost0.entries();
  const auto& b = cost1.entries();
  // Both are sorted by key: merge.
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      if (a[i].second > 0 && b[j].second > 0 && a[i].second != b[j].second) {
        out.push_back(a[i].first);
      }
      ++i;
      ++j;
    }
  }
  return out;
}

std::optional<CostSiteId> SelectMetric(const CostVector& cost0,
                                       const CostVector& cost1, Rng& rng) {
  auto candidates = QualifyingMetrics(cost0, cost1);
  if (candidates.empty()) return std::nullopt;
  return candidates[rng.Below(candidates.size())];
}

namespace {

using i128 = __int128;

std::optional<i128> Mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

std::optional<i128> Sub(i128 a, i128 b) {
  i128 r;
  if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
  return r;
}

// n / d rounded to the nearest integer, ties away from zero.
i128 DivRoundHalfAway(i128 n, i128 d) {
  i128 q = n / d;
  i128 r = n % d;
  i128 abs_r = r < 0 ? -r : r;
  i128 abs_d = d < 0 ? -d : d;
  if (abs_r != 0 && abs_r >= abs_d - abs_r) {
    q += ((n < 0) == (d < 0)) ? 1 : -1;
  }
  return q;
}

}  // namespace

std::optional<int64_t> FitAndSolve(const LearnSample& s, IntWidth width) {
  // m = (c1 - c0) / (i1 - i0),  k = c0 - m*i0,  root = -k/m
  //   = i0 - c0 * (i1 - i0) / (c1 - c0)
  //   = (i0 * (c1 - c0) - c0 * (i1 - i0)) / (c1 - c0)
  constexpr Cost kMaxSigned = ~Cost{0} >> 1;
  if (s.c0 > kMaxSigned || s.c1 > kMaxSigned) return std::nullopt;
  const i128 dc = static_cast<i128>(s.c1) - static_cast<i128>(s.c0);
  const i128 di = static_cast<i128>(s.i1) - static_cast<i128>(s.i0);
  if (dc == 0 || di == 0) return std::nullopt;
  auto lhs = Mul(s.i0, dc);
  auto rhs = Mul(static_cast<i128>(s.c0), di);
  if (!lhs || !rhs) return std::nullopt;
  auto num = Sub(*lhs, *rhs);
  if (!num) return std::nullopt;
  i128 root = DivRoundHalfAway(*num, dc);
  return width.contains(root) ? static_cast<int64_t>(root) : width.wrap(root);
}

void FlipCoverage::Observe(const CostVector& costs) {
  for (const auto& [metric, cost] : costs.entries()) {
    if (cost == 0) zeroed_.insert(metric);
  }
}

MetricChooser RandomMetricChooser(Rng& rng) {
  return [&rng](std::span<const CostSiteId> candidates) {
    return candidates[rng.Below(candidates.size())];
  };
}

MetricChooser RarestSiteChooser(Rng& rng, const FlipCoverage& coverage) {
  return [&rng, &coverage](std::span<const CostSiteId> candidates) {
    std::vector<CostSiteId> unseen;
    for (CostSiteId c : candidates) {
      if (!coverage.Seen(c)) unseen.push_back(c);
    }
    if (unseen.empty()) return candidates[rng.Below(candidates.size())];
    return unseen[rng.Below(unseen.size())];
  };
}

std::optional<LearnedInput> Learn(const TargetProgram& prog, const InputVector& input,
                                  const CostVector& cost,
                                  const InputVector& mutant,
                                  const CostVector& mutant_cost,
                                  const MetricChooser& choose,
                                  LearnHistory* history) {
  auto key = DiffSingleParam(input, mutant);
  if (!key) return std::nullopt;
  auto candidates = QualifyingMetrics(cost, mutant_cost);
  if (candidates.empty()) return std::nullopt;
  const CostSiteId metric = choose(candidates);

  LearnSample sample;
  sample.i0 = input.calls[key->call_index].args[key->arg_index];
  sample.i1 = mutant.calls[key->call_index].args[key->arg_index];
  sample.c0 = *cost.Get(metric);
  sample.c1 = *mutant_cost.Get(metric);
  sample.metric = metric;

  const uint32_t fn = input.calls[key->call_index].function;
  const IntWidth width = prog.functions.at(fn).params.at(key->arg_index).width;
  auto value = FitAndSolve(sample, width);
  if (!value || *value == sample.i0 || *value == sample.i1) return std::nullopt;
  if (history) {
    if (history->Contains(*key, metric, *value)) return std::nullopt;
    history->Insert(*key, metric, *value);
  }
  LearnedInput learned{input, metric, *key};
  learned.input.calls[key->call_index].args[key->arg_index] = *value;
  return learned;
}

}  // namespace lfuzz
