#ifndef LFUZZ_CLI_H_
#define LFUZZ_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace lfuzz {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInternal = 2;

// Entry point of the `lfuzz` tool. args excludes the program name.
// Subcommands: fuzz, compare, replay, bench.
int CliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lfuzz

#endif  // LFUZZ_CLI_H_
