// Targets compiled into the binary from targets/*.ir.
#ifndef LFUZZ_BENCHMARKS_H_
#define LFUZZ_BENCHMARKS_H_

#include <string>
#include <string_view>
#include <vector>

#include "lfuzz/ir.h"

namespace lfuzz {

struct BuiltinTarget {
  std::string_view name;
  std::string_view source;
};

const std::vector<BuiltinTarget>& BuiltinTargets();

// Names of the targets that contain no reachable bug.
std::vector<std::string> CleanTargetNames();

// Parses the built-in target `name`; throws std::invalid_argument if unknown.
TargetProgram LoadBuiltin(std::string_view name);

// Resolves "builtin:NAME", a bare built-in name, or a file path.
TargetProgram LoadTarget(const std::string& spec);

}  // namespace lfuzz

#endif  // LFUZZ_BENCHMARKS_H_
