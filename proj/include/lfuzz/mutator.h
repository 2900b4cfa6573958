#ifndef LFUZZ_MUTATOR_H_
#define LFUZZ_MUTATOR_H_

#include <cstdint>
#include <map>
#include <vector>

#include "lfuzz/input.h"
#include "lfuzz/ir.h"
#include "lfuzz/rng.h"

namespace lfuzz {

enum class MutationOp { kBitFlip, kArith, kInteresting, kRandomValue };

struct MutationWeights {
  double bit_flip = 1.0;
  double arith = 1.0;
  double interesting = 1.0;
  double random_value = 1.0;
  // Chance of inserting, removing or replacing a call instead of mutating
  // a slot.
  double structural = 0.1;
};

// 0, +-1, the width's extremes and powers of two +- 1, sorted and unique.
std::vector<int64_t> InterestingValues(IntWidth width);

int64_t FlipBit(int64_t value, unsigned bit, IntWidth width);
// value + delta, wrapped to the width.
int64_t AddWrapping(int64_t value, int64_t delta, IntWidth width);

class Mutator {
 public:
  Mutator(const TargetProgram& prog, MutationWeights weights, size_t max_calls);

  // FuzzInput: returns a copy of `input` changed in exactly one integer slot
  // or, with probability weights.structural (or always, when the input has
  // no slots), changed in its call structure.
  InputVector Mutate(const InputVector& input, Rng& rng) const;

  // Applies a single slot mutation; the result may equal the old value.
  int64_t MutateValue(int64_t value, IntWidth width, MutationOp op, Rng& rng) const;

  Call RandomCall(Rng& rng) const;
  // One call per function in declaration order, truncated to max_calls,
  // with random arguments.
  InputVector SeedInput(Rng& rng) const;

  size_t max_calls() const { return max_calls_; }

 private:
  bool MutateStructure(InputVector& input, Rng& rng) const;
  MutationOp PickOp(Rng& rng) const;
  IntWidth WidthOf(const InputVector& input, ParamKey key) const;

  const TargetProgram& prog_;
  MutationWeights weights_;
  size_t max_calls_;
  std::map<unsigned, std::vector<int64_t>> interesting_;
};

}  // namespace lfuzz

#endif  // LFUZZ_MUTATOR_H_
