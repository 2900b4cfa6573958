// Transaction-sequence inputs and their JSON file format:
//   [{"fn": "PopCode", "args": []}, {"fn": "SetCodeAt", "args": [3, 7]}]
#ifndef LFUZZ_INPUT_H_
#define LFUZZ_INPUT_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfuzz/ir.h"

namespace lfuzz {

struct Call {
  uint32_t function = 0;
  std::vector<int64_t> args;
  friend bool operator==(const Call&, const Call&) = default;
  friend auto operator<=>(const Call&, const Call&) = default;
};

// One fuzzer input: an ordered sequence of calls sharing persistent storage.
struct InputVector {
  std::vector<Call> calls;

  size_t SlotCount() const;
  friend bool operator==(const InputVector&, const InputVector&) = default;
  friend auto operator<=>(const InputVector&, const InputVector&) = default;
};

// Addresses one integer slot of an InputVector.
struct ParamKey {
  uint32_t call_index = 0;
  uint32_t arg_index = 0;
  friend bool operator==(const ParamKey&, const ParamKey&) = default;
  friend auto operator<=>(const ParamKey&, const ParamKey&) = default;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks function indices, arity and per-parameter ranges.
void ValidateInput(const TargetProgram& prog, const InputVector& input);

nlohmann::json InputToJson(const TargetProgram& prog, const InputVector& input);
// Throws InputError on unknown functions, arity mismatches or out-of-range
// argument values.
InputVector InputFromJson(const TargetProgram& prog, const nlohmann::json& j);

std::string FormatInput(const TargetProgram& prog, const InputVector& input);

}  // namespace lfuzz

#endif  // LFUZZ_INPUT_H_
