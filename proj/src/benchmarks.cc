#include "lfuzz/benchmarks.h"

#include <filesystem>
#include <stdexcept>

#include "lfuzz/parser.h"

namespace lfuzz {

const std::vector<BuiltinTarget>& BuiltinTargets() {
  static const std::vector<BuiltinTarget> targets = {
#include "builtin_targets.inc"
  };
  return targets;
}

std::vector<std::string> CleanTargetNames() {
  std::vector<std::string> out;
  for (const BuiltinTarget& t : BuiltinTargets()) {
    if (t.name.starts_with("clean_")) out.emplace_back(t.name);
  }
  return out;
}

TargetProgram LoadBuiltin(std::string_view name) {
  for (const BuiltinTarget& t : BuiltinTargets()) {
    if (t.name == name) {
      return ParseProgram(t.source, std::string(name), "builtin:" + std::string(name));
    }
  }
  throw std::invalid_argument("unknown built-in target '" + std::string(name) + "'");
}

TargetProgram LoadTarget(const std::string& spec) {
  constexpr std::string_view kPrefix = "builtin:";
  if (spec.starts_with(kPrefix)) return LoadBuiltin(spec.substr(kPrefix.size()));
  if (!std::filesystem::exists(spec)) {
    for (const BuiltinTarget& t : BuiltinTargets()) {
      if (t.name == spec) return LoadBuiltin(spec);
    }
  }
  return ParseProgramFile(spec);
}

}  // namespace lfuzz
