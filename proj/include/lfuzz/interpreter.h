// Deterministic interpreter for TargetProgram. Execution is a pure function
// of (program, input, config); each call owns its machine state.
#ifndef LFUZZ_INTERPRETER_H_
#define LFUZZ_INTERPRETER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lfuzz/input.h"
#include "lfuzz/instrument.h"
#include "lfuzz/ir.h"

namespace lfuzz {

inline constexpr uint64_t kDefaultFuel = 100'000;

struct ExecConfig {
  // Machine word width for locals, storage values and arithmetic.
  IntWidth word{64};
  // Trap on +, -, *, unary - overflow; otherwise wrap to the word width.
  bool checked_arithmetic = true;
  // Total step budget for the whole sequence.
  uint64_t fuel = kDefaultFuel;
  // Address compared against every storage write. When unset, no write
  // costs are recorded.
  std::optional<uint64_t> probe_address;
};

enum class CheckedErrorKind : uint8_t { kOverflow, kDivByZero, kOutOfBounds };
std::string_view CheckedErrorName(CheckedErrorKind kind);

struct CallOutcome {
  OutcomeKind kind = OutcomeKind::kReturned;
  int64_t value = 0;  // kReturned only
  SiteId site = 0;    // failing site for require/assert/checked errors
  CheckedErrorKind error = CheckedErrorKind::kOverflow;  // kCheckedError only
  friend bool operator==(const CallOutcome&, const CallOutcome&) = default;
};

struct StorageWrite {
  uint64_t address;
  int64_t value;
  SiteId site;
  // Belonged to a call that failed and was reverted.
  bool reverted = false;
  friend bool operator==(const StorageWrite&, const StorageWrite&) = default;
};

struct ExecutionResult {
  // One entry per executed call. After fuel exhaustion the remaining calls
  // are not executed.
  std::vector<CallOutcome> outcomes;
  BranchTrace trace;
  CostVector costs;
  std::vector<StorageWrite> storage_writes;
  // Final persistent storage; addresses never written are zero.
  std::map<uint64_t, int64_t> storage;
  uint64_t steps = 0;

  bool fuel_exhausted() const {
    return !outcomes.empty() && outcomes.back().kind == OutcomeKind::kFuelExhausted;
  }
  friend bool operator==(const ExecutionResult&, const ExecutionResult&) = default;
};

// Runs every call of `input` in order against one persistent storage.
// A failing call is reverted and execution continues with the next call.
// Throws InputError if the input does not match the program.
ExecutionResult Execute(const TargetProgram& prog, const InputVector& input,
                        const ExecConfig& cfg = {});

}  // namespace lfuzz

#endif  // LFUZZ_INTERPRETER_H_
