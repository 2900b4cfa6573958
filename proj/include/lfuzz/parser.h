#ifndef LFUZZ_PARSER_H_
#define LFUZZ_PARSER_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include "lfuzz/ir.h"

namespace lfuzz {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Parses IR source text. The grammar is documented in docs/ir.md.
// Throws ParseError on malformed input, duplicate names, undeclared
// identifiers, or a program without functions.
TargetProgram ParseProgram(std::string_view source, std::string name = "",
                           std::string source_path = "");

// Reads and parses a file; I/O failures are reported as ParseError at 0:0.
TargetProgram ParseProgramFile(const std::string& path);

}  // namespace lfuzz

#endif  // LFUZZ_PARSER_H_
