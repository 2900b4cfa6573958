#include "lfuzz/mutator.h"

#include <algorithm>
#include <stdexcept>

namespace lfuzz {

std::vector<int64_t> InterestingValues(IntWidth width) {
  std::vector<int64_t> out = {0, 1, -1, width.min(), width.max()};
  for (unsigned k = 1; k + 1 < width.bits; ++k) {
    const __int128 p = static_cast<__int128>(1) << k;
    for (__int128 v : {p - 1, p, p + 1, -p - 1, -p, -p + 1}) {
      if (width.contains(v)) out.push_back(static_cast<int64_t>(v));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int64_t FlipBit(int64_t value, unsigned bit, IntWidth width) {
  return width.wrap(static_cast<int64_t>(static_cast<uint64_t>(value) ^ (uint64_t{1} << bit)));
}

int64_t AddWrapping(int64_t value, int64_t delta, IntWidth width) {
  return width.wrap(static_cast<__int128>(value) + delta);
}

Mutator::Mutator(const TargetProgram& prog, MutationWeights weights, size_t max_calls)
    : prog_(prog), weights_(weights), max_calls_(max_calls) {
  if (max_calls_ == 0) throw std::invalid_argument("max_calls must be at least 1");
  const double total = weights.bit_flip + weights.arith + weights.interesting +
                       weights.random_value;
  if (!(total > 0)) throw std::invalid_argument("mutation weights must sum to > 0");
  for (const FunctionDef& fn : prog.functions) {
    for (const Param& p : fn.params) {
      if (!interesting_.count(p.width.bits)) {
        interesting_[p.width.bits] = InterestingValues(p.width);
      }
    }
  }
}

MutationOp Mutator::PickOp(Rng& rng) const {
  const double total = weights_.bit_flip + weights_.arith + weights_.interesting +
                       weights_.random_value;
  double x = rng.Unit() * total;
  if ((x -= weights_.bit_flip) < 0) return MutationOp::kBitFlip;
  if ((x -= weights_.arith) < 0) return MutationOp::kArith;
  if ((x -= weights_.interesting) < 0) return MutationOp::kInteresting;
  return MutationOp::kRandomValue;
}

int64_t Mutator::MutateValue(int64_t value, IntWidth width, MutationOp op,
                             Rng& rng) const {
  switch (op) {
    case MutationOp::kBitFlip:
      return FlipBit(value, static_cast<unsigned>(rng.Below(width.bits)), width);
    case MutationOp::kArith: {
      int64_t delta = static_cast<int64_t>(rng.Below(64)) + 1;
      if (rng.Below(2)) delta = -delta;
      return AddWrapping(value, delta, width);
    }
    case MutationOp::kInteresting: {
      auto it = interesting_.find(width.bits);
      if (it == interesting_.end()) {
        auto values = InterestingValues(width);
        return values[rng.Below(values.size())];
      }
      return it->second[rng.Below(it->second.size())];
    }
    case MutationOp::kRandomValue:
      return rng.Range(width.min(), width.max());
  }
  return value;
}

IntWidth Mutator::WidthOf(const InputVector& input, ParamKey key) const {
  const Call& call = input.calls[key.call_index];
  return prog_.functions.at(call.function).params.at(key.arg_index).width;
}

Call Mutator::RandomCall(Rng& rng) const {
  Call call;
  call.function = static_cast<uint32_t>(rng.Below(prog_.functions.size()));
  for (const Param& p : prog_.functions[call.function].params) {
    call.args.push_back(rng.Range(p.width.min(), p.width.max()));
  }
  return call;
}

InputVector Mutator::SeedInput(Rng& rng) const {
  InputVector seed;
  for (uint32_t f = 0; f < prog_.functions.size() && seed.calls.size() < max_calls_; ++f) {
    Call call{f, {}};
    for (const Param& p : prog_.functions[f].params) {
      call.args.push_back(rng.Range(p.width.min(), p.width.max()));
    }
    seed.calls.push_back(std::move(call));
  }
  return seed;
}

bool Mutator::MutateStructure(InputVector& input, Rng& rng) const {
  enum { kInsert, kRemove, kReplace };
  std::vector<int> ops;
  if (input.calls.size() < max_calls_) ops.push_back(kInsert);
  if (input.calls.size() > 1) ops.push_back(kRemove);
  if (!input.calls.empty()) ops.push_back(kReplace);
  if (ops.empty()) return false;
  const InputVector before = input;
  switch (ops[rng.Below(ops.size())]) {
    case kInsert: {
      size_t at = rng.Below(input.calls.size() + 1);
      input.calls.insert(input.calls.begin() + at, RandomCall(rng));
      break;
    }
    case kRemove:
      input.calls.erase(input.calls.begin() + rng.Below(input.calls.size()));
      break;
    case kReplace:
      input.calls[rng.Below(input.calls.size())] = RandomCall(rng);
      break;
  }
  return input != before;
}

InputVector Mutator::Mutate(const InputVector& input, Rng& rng) const {
  InputVector out = input;
  const size_t slots = input.SlotCount();
  if (slots == 0 || rng.Chance(weights_.structural)) {
    // A replacement can reproduce the same call; retry a few times.
    for (int attempt = 0; attempt < 8; ++attempt) {
      if (MutateStructure(out, rng)) return out;
      out = input;
    }
    if (slots == 0) return out;  // single no-argument call space
  }
  size_t slot = rng.Below(slots);
  ParamKey key;
  for (uint32_t c = 0; c < out.calls.size(); ++c) {
    if (slot < out.calls[c].args.size()) {
      key = {c, static_cast<uint32_t>(slot)};
      break;
    }
    slot -= out.calls[c].args.size();
  }
  const IntWidth width = WidthOf(out, key);
  int64_t& value = out.calls[key.call_index].args[key.arg_index];
  const int64_t old = value;
  do {
    value = MutateValue(old, width, PickOp(rng), rng);
  } while (value == old);
  return out;
}

}  // namespace lfuzz
