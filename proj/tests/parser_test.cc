#include "lfuzz/parser.h"

#include <gtest/gtest.h>

#include <functional>
#include <string>

#include "lfuzz/benchmarks.h"
#include "lfuzz/interpreter.h"

namespace lfuzz {
namespace {

std::string ParseErrorOf(const std::string& src) {
  try {
    ParseProgram(src);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(Parser, BarHasFourBranchSitesAndNoStores) {
  const TargetProgram bar = LoadBuiltin("bar");
  ASSERT_EQ(bar.functions.size(), 1u);
  EXPECT_EQ(bar.functions[0].params.size(), 3u);
  EXPECT_EQ(bar.CountSites(SiteKind::kBranch), 4u);
  EXPECT_EQ(bar.CountSites(SiteKind::kStore), 0u);
}

TEST(Parser, WalletHasStoreSites) {
  const TargetProgram wallet = LoadBuiltin("wallet");
  EXPECT_GE(wallet.CountSites(SiteKind::kStore), 1u);
  EXPECT_TRUE(wallet.FindFunction("SetCodeAt").has_value());
  EXPECT_TRUE(wallet.FindFunction("PopCode").has_value());
}

TEST(Parser, EveryBuiltinParses) {
  for (const BuiltinTarget& t : BuiltinTargets()) {
    EXPECT_NO_THROW(LoadBuiltin(t.name)) << t.name;
  }
}

TEST(Parser, EmptySourceHasNoFunctions) {
  EXPECT_NE(ParseErrorOf("").find("no functions"), std::string::npos);
  EXPECT_NE(ParseErrorOf("// only a comment\n").find("no functions"), std::string::npos);
  EXPECT_NE(ParseErrorOf("storage cell x;").find("no functions"), std::string::npos);
}

TEST(Parser, RejectsDuplicateFunction) {
  EXPECT_NE(ParseErrorOf("fn f() { return 0; }\nfn f() { return 1; }").find("duplicate"),
            std::string::npos);
}

TEST(Parser, RejectsUndeclaredIdentifier) {
  EXPECT_NE(ParseErrorOf("fn f(a) { return b; }").find("undeclared identifier 'b'"),
            std::string::npos);
}

TEST(Parser, LocalsAreLexicallyScoped) {
  EXPECT_NE(ParseErrorOf("fn f(a) { if a < 1 { let t = 1; } return t; }").find("undeclared"),
            std::string::npos);
}

TEST(Parser, RejectsTooManyParams) {
  std::string params;
  for (int i = 0; i < 17; ++i) params += (i ? ", p" : "p") + std::to_string(i);
  EXPECT_NE(ParseErrorOf("fn f(" + params + ") { return 0; }").find("too many"),
            std::string::npos);
  params.clear();
  for (int i = 0; i < 16; ++i) params += (i ? ", p" : "p") + std::to_string(i);
  EXPECT_NO_THROW(ParseProgram("fn f(" + params + ") { return 0; }"));
}

TEST(Parser, ReportsLineAndColumn) {
  try {
    ParseProgram("fn f(a) {\n  let x = a +;\n}\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 14);
  }
}

TEST(Parser, RejectsConnectivesInWhile) {
  EXPECT_FALSE(ParseErrorOf("fn f(a) { while a < 1 && a > 0 { a = a + 1; } return 0; }").empty());
}

TEST(Parser, ParamWidths) {
  const TargetProgram p = ParseProgram("fn f(a: i8, b: i16, c: i32, d: i64, e) { return 0; }");
  const auto& params = p.functions[0].params;
  EXPECT_EQ(params[0].width.bits, 8u);
  EXPECT_EQ(params[1].width.bits, 16u);
  EXPECT_EQ(params[2].width.bits, 32u);
  EXPECT_EQ(params[3].width.bits, 64u);
  EXPECT_EQ(params[4].width.bits, 64u);
  EXPECT_FALSE(ParseErrorOf("fn f(a: u8) { return 0; }").empty());
}

TEST(Parser, DeterministicSiteNumbering) {
  const TargetProgram a = LoadBuiltin("wallet");
  const TargetProgram b = LoadBuiltin("wallet");
  ASSERT_EQ(a.sites.size(), b.sites.size());
  for (size_t i = 0; i < a.sites.size(); ++i) {
    EXPECT_EQ(a.sites[i].kind, b.sites[i].kind);
    EXPECT_EQ(a.sites[i].line, b.sites[i].line);
    EXPECT_EQ(a.sites[i].column, b.sites[i].column);
  }
}

TEST(Parser, BarSitesInLexicalOrder) {
  const TargetProgram bar = LoadBuiltin("bar");
  int last_line = 0;
  for (SiteId s = 0; s < bar.sites.size(); ++s) {
    if (bar.sites[s].kind != SiteKind::kBranch) continue;
    EXPECT_GT(bar.sites[s].line, last_line);
    last_line = bar.sites[s].line;
  }
}

TEST(Parser, LeadingRequiresAreEntryGuards) {
  const TargetProgram p = ParseProgram(
      "fn f(a, b) {\n"
      "  require(a > 0);\n"
      "  require(b > 0);\n"
      "  let c = a;\n"
      "  require(c > 1);\n"
      "  return 0;\n"
      "}\n");
  std::vector<bool> flags;
  for (const Stmt& s : p.functions[0].body) {
    if (const auto* r = std::get_if<stmt::Require>(&s.node)) flags.push_back(r->at_entry);
  }
  EXPECT_EQ(flags, (std::vector<bool>{true, true, false}));
}

// Connectives are lowered to single-comparison branches; the lowered
// program must compute the same function as the C++ expression.
void CheckConnective(const std::string& cond,
                     const std::function<bool(int64_t, int64_t)>& oracle) {
  const TargetProgram p =
      ParseProgram("fn f(a, b) { if " + cond + " { return 1; } return 0; }");
  for (int64_t a = -4; a <= 4; ++a) {
    for (int64_t b = -4; b <= 4; ++b) {
      const ExecutionResult r = Execute(p, InputVector{{Call{0, {a, b}}}});
      ASSERT_EQ(r.outcomes.size(), 1u);
      EXPECT_EQ(r.outcomes[0].value, oracle(a, b) ? 1 : 0)
          << cond << " at a=" << a << " b=" << b;
      for (const TraceEvent& e : r.trace.events) {
        if (e.kind == TraceEvent::Kind::kBranch) {
          EXPECT_TRUE(p.IsConditionSite(e.site));
        }
      }
    }
  }
}

TEST(Parser, ConnectivesMatchBruteForce) {
  CheckConnective("a < 1 && b > 2", [](int64_t a, int64_t b) { return a < 1 && b > 2; });
  CheckConnective("a < 1 || b > 2", [](int64_t a, int64_t b) { return a < 1 || b > 2; });
  CheckConnective("!(a == b)", [](int64_t a, int64_t b) { return !(a == b); });
  CheckConnective("!(a < 0 && b != 3) || a == 2",
                  [](int64_t a, int64_t b) { return !(a < 0 && b != 3) || a == 2; });
  CheckConnective("(a >= 1 || b <= -1) && a != b",
                  [](int64_t a, int64_t b) { return (a >= 1 || b <= -1) && a != b; });
}

void CheckGuard(const std::string& guard,
                const std::function<bool(int64_t, int64_t)>& oracle) {
  const TargetProgram p = ParseProgram("fn f(a, b) { " + guard + "; return 1; }");
  for (int64_t a = -3; a <= 3; ++a) {
    for (int64_t b = -3; b <= 3; ++b) {
      const ExecutionResult r = Execute(p, InputVector{{Call{0, {a, b}}}});
      const bool passed = r.outcomes[0].kind == OutcomeKind::kReturned;
      EXPECT_EQ(passed, oracle(a, b)) << guard << " at a=" << a << " b=" << b;
    }
  }
}

TEST(Parser, GuardConnectivesMatchBruteForce) {
  CheckGuard("require(a > 0 && b > 0)", [](int64_t a, int64_t b) { return a > 0 && b > 0; });
  CheckGuard("require(a > 0 || b > 0)", [](int64_t a, int64_t b) { return a > 0 || b > 0; });
  CheckGuard("assert(!(a == 1 || b == 1))",
             [](int64_t a, int64_t b) { return !(a == 1 || b == 1); });
}

TEST(Parser, MissingFileIsParseError) {
  EXPECT_THROW(ParseProgramFile("/nonexistent/target.ir"), ParseError);
}

}  // namespace
}  // namespace lfuzz
