#include "lfuzz/mutator.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "lfuzz/benchmarks.h"
#include "lfuzz/learner.h"
#include "lfuzz/parser.h"

namespace lfuzz {
namespace {

InputVector Bar(int64_t a, int64_t b, int64_t c) { return InputVector{{Call{0, {a, b, c}}}}; }

TEST(Mutator, AlwaysDiffersFromItsInput) {
  for (const BuiltinTarget& t : BuiltinTargets()) {
    const TargetProgram prog = LoadBuiltin(t.name);
    Mutator mutator(prog, MutationWeights{}, 3);
    Rng rng(42);
    InputVector in = mutator.SeedInput(rng);
    for (int i = 0; i < 2000; ++i) {
      const InputVector out = mutator.Mutate(in, rng);
      ASSERT_NE(out, in) << t.name;
      ASSERT_NO_THROW(ValidateInput(prog, out)) << t.name;
      in = out;
    }
  }
}

TEST(Mutator, SlotMutationsTouchOneSlotAndReachAll) {
  const TargetProgram bar = LoadBuiltin("bar");
  MutationWeights w;
  w.structural = 0;
  Mutator mutator(bar, w, 1);
  Rng rng(9);
  const InputVector in = Bar(-1, 0, -5);
  std::set<uint32_t> touched;
  for (int i = 0; i < 10'000; ++i) {
    const auto key = DiffSingleParam(in, mutator.Mutate(in, rng));
    ASSERT_TRUE(key.has_value());
    touched.insert(key->arg_index);
  }
  EXPECT_EQ(touched, (std::set<uint32_t>{0, 1, 2}));
}

TEST(Mutator, StructuralOpsRespectMaxCalls) {
  const TargetProgram w = LoadBuiltin("wallet");
  MutationWeights weights;
  weights.structural = 1.0;
  Mutator mutator(w, weights, 3);
  Rng rng(4);
  InputVector in = mutator.SeedInput(rng);
  std::set<size_t> lengths;
  for (int i = 0; i < 3000; ++i) {
    in = mutator.Mutate(in, rng);
    ASSERT_GE(in.calls.size(), 1u);
    ASSERT_LE(in.calls.size(), 3u);
    lengths.insert(in.calls.size());
  }
  EXPECT_EQ(lengths, (std::set<size_t>{1, 2, 3}));
}

TEST(Mutator, ZeroSlotInputsMutateStructurally) {
  const TargetProgram w = LoadBuiltin("wallet");
  Mutator mutator(w, MutationWeights{}, 3);
  Rng rng(1);
  const InputVector pop{{Call{*w.FindFunction("PopCode"), {}}}};
  ASSERT_EQ(pop.SlotCount(), 0u);
  EXPECT_NE(mutator.Mutate(pop, rng), pop);
}

TEST(Mutator, SeedInputShape) {
  const TargetProgram w = LoadBuiltin("wallet");
  Rng rng(2);
  const InputVector all = Mutator(w, MutationWeights{}, 16).SeedInput(rng);
  ASSERT_EQ(all.calls.size(), w.functions.size());
  for (size_t i = 0; i < all.calls.size(); ++i) {
    EXPECT_EQ(all.calls[i].function, i);
    EXPECT_EQ(all.calls[i].args.size(), w.functions[i].params.size());
  }
  EXPECT_EQ(Mutator(w, MutationWeights{}, 2).SeedInput(rng).calls.size(), 2u);
}

TEST(InterestingValues, Contents) {
  const std::vector<int64_t> v = InterestingValues(IntWidth{8});
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
  EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
  for (int64_t x : {-128, -1, 0, 1, 127, 15, 17, 63, 65}) {
    EXPECT_TRUE(std::binary_search(v.begin(), v.end(), x)) << x;
  }
  for (int64_t x : v) EXPECT_TRUE(IntWidth{8}.contains(x)) << x;
  const std::vector<int64_t> w64 = InterestingValues(IntWidth{64});
  EXPECT_TRUE(std::binary_search(w64.begin(), w64.end(), std::numeric_limits<int64_t>::min()));
  EXPECT_TRUE(std::binary_search(w64.begin(), w64.end(), std::numeric_limits<int64_t>::max()));
}

TEST(SlotOps, WrapToWidth) {
  EXPECT_EQ(AddWrapping(127, 1, IntWidth{8}), -128);
  EXPECT_EQ(AddWrapping(-128, -1, IntWidth{8}), 127);
  EXPECT_EQ(AddWrapping(5, -7, IntWidth{64}), -2);
  EXPECT_EQ(FlipBit(0, 7, IntWidth{8}), -128);
  EXPECT_EQ(FlipBit(1, 0, IntWidth{8}), 0);
  EXPECT_EQ(FlipBit(0, 63, IntWidth{64}), std::numeric_limits<int64_t>::min());
}

TEST(Mutator, ValuesStayInDeclaredWidth) {
  const TargetProgram p = ParseProgram("fn f(a: i8, b: i16) { return 0; }");
  Mutator mutator(p, MutationWeights{}, 1);
  Rng rng(6);
  InputVector in = mutator.SeedInput(rng);
  for (int i = 0; i < 5000; ++i) {
    in = mutator.Mutate(in, rng);
    ASSERT_TRUE(IntWidth{8}.contains(in.calls[0].args[0]));
    ASSERT_TRUE(IntWidth{16}.contains(in.calls[0].args[1]));
  }
}

TEST(Mutator, Deterministic) {
  const TargetProgram w = LoadBuiltin("wallet");
  Mutator mutator(w, MutationWeights{}, 3);
  Rng r1(77), r2(77);
  InputVector a = mutator.SeedInput(r1), b = mutator.SeedInput(r2);
  for (int i = 0; i < 500; ++i) {
    a = mutator.Mutate(a, r1);
    b = mutator.Mutate(b, r2);
    ASSERT_EQ(a, b);
  }
}

}  // namespace
}  // namespace lfuzz
