#include "lfuzz/parser.h"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace lfuzz {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { kIdent, kInt, kPunct, kEof };

struct Token {
  Tok kind;
  std::string text;
  uint64_t int_value = 0;
  int line = 1;
  int column = 1;
};

std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_')) {
        ++j;
      }
      tok.kind = Tok::kIdent;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      int base = 10;
      if (c == '0' && i + 1 < src.size() && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
        base = 16;
        j += 2;
      }
      size_t digits_begin = j;
      while (j < src.size() && std::isxdigit(static_cast<unsigned char>(src[j]))) ++j;
      uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(src.data() + digits_begin, src.data() + j,
                                       value, base);
      if (ec != std::errc() || ptr != src.data() + j || j == digits_begin) {
        throw ParseError(line, col, "malformed integer literal");
      }
      if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) ||
                             src[j] == '_')) {
        throw ParseError(line, col, "malformed integer literal");
      }
      tok.kind = Tok::kInt;
      tok.text = std::string(src.substr(i, j - i));
      tok.int_value = value;
      advance(j - i);
    } else {
      static constexpr std::string_view kTwoChar[] = {"==", "!=", "<=", ">=",
                                                      "&&", "||"};
      tok.kind = Tok::kPunct;
      bool matched = false;
      if (i + 1 < src.size()) {
        for (std::string_view op : kTwoChar) {
          if (src.substr(i, 2) == op) {
            tok.text = std::string(op);
            matched = true;
            break;
          }
        }
      }
      if (!matched) {
        static constexpr std::string_view kSingle = "{}()[];,=<>+-*/%!.:";
        if (kSingle.find(c) == std::string_view::npos) {
          throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        tok.text = std::string(1, c);
      }
      advance(tok.text.size());
    }
    out.push_back(std::move(tok));
  }
  Token eof;
  eof.kind = Tok::kEof;
  eof.line = line;
  eof.column = col;
  out.push_back(eof);
  return out;
}

// Boolean condition before desugaring.
struct Cond {
  enum Kind { kCmp, kAnd, kOr, kNot } kind;
  std::optional<CmpExpr> cmp;
  std::vector<Cond> children;
};

// Pushes negations down to the comparisons (De Morgan).
Cond PushNot(Cond c, bool negate) {
  switch (c.kind) {
    case Cond::kCmp:
      if (negate) c.cmp->op = NegateCmp(c.cmp->op);
      return c;
    case Cond::kNot:
      return PushNot(std::move(c.children[0]), !negate);
    case Cond::kAnd:
    case Cond::kOr: {
      if (negate) c.kind = c.kind == Cond::kAnd ? Cond::kOr : Cond::kAnd;
      for (auto& child : c.children) child = PushNot(std::move(child), negate);
      return c;
    }
  }
  return c;
}

class Parser {
 public:
  explicit Parser(std::string_view source) : toks_(Lex(source)) {}

  TargetProgram Parse(std::string name, std::string source_path) {
    TargetProgram prog;
    prog.name = std::move(name);
    prog.source_path = std::move(source_path);
    while (!AtEof()) {
      if (PeekIdent("storage")) {
        ParseStorageDecl(prog);
      } else if (PeekIdent("fn")) {
        ParseFunction(prog);
      } else {
        Fail(Peek(), "expected 'fn' or 'storage' declaration");
      }
    }
    if (prog.functions.empty()) Fail(Peek(), "no functions");
    AssignSites(prog);
    return prog;
  }

 private:
  struct ProtoSite {
    SiteKind kind;
    int line;
    int column;
  };

  // Site ids are provisional during parsing: desugaring may duplicate
  // blocks, so final ids are handed out by AssignSites.
  SiteId NewSite(SiteKind kind, const Token& at) {
    proto_sites_.push_back({kind, at.line, at.column});
    return static_cast<SiteId>(proto_sites_.size() - 1);
  }

  [[noreturn]] void Fail(const Token& at, const std::string& msg) {
    throw ParseError(at.line, at.column, msg);
  }

  const Token& Peek(size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool AtEof() const { return Peek().kind == Tok::kEof; }
  bool PeekPunct(std::string_view p, size_t ahead = 0) const {
    return Peek(ahead).kind == Tok::kPunct && Peek(ahead).text == p;
  }
  bool PeekIdent(std::string_view id, size_t ahead = 0) const {
    return Peek(ahead).kind == Tok::kIdent && Peek(ahead).text == id;
  }
  const Token& Next() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::kEof) ++pos_;
    return t;
  }
  const Token& Expect(std::string_view p) {
    if (!PeekPunct(p)) {
      Fail(Peek(), "expected '" + std::string(p) + "', found '" + Peek().text + "'");
    }
    return Next();
  }
  bool Accept(std::string_view p) {
    if (PeekPunct(p)) {
      Next();
      return true;
    }
    return false;
  }
  const Token& ExpectIdent(std::string_view what) {
    if (Peek().kind != Tok::kIdent) Fail(Peek(), "expected " + std::string(what));
    return Next();
  }
  void ExpectKeyword(std::string_view kw) {
    if (!PeekIdent(kw)) Fail(Peek(), "expected '" + std::string(kw) + "'");
    Next();
  }

  static bool IsReserved(std::string_view s) {
    static constexpr std::string_view kWords[] = {
        "fn", "let", "if", "else", "while", "require", "assert",
        "return", "storage", "cell", "array", "hash"};
    for (auto w : kWords) {
      if (s == w) return true;
    }
    return false;
  }

  void CheckNewGlobalName(const Token& tok, const TargetProgram& prog) {
    if (IsReserved(tok.text)) Fail(tok, "'" + tok.text + "' is a reserved word");
    for (const auto& s : prog.storage) {
      if (s.name == tok.text) Fail(tok, "duplicate storage name '" + tok.text + "'");
    }
  }

  void ParseStorageDecl(TargetProgram& prog) {
    Next();  // storage
    StorageDecl decl;
    if (PeekIdent("cell")) {
      decl.kind = StorageKind::kCell;
    } else if (PeekIdent("array")) {
      decl.kind = StorageKind::kArray;
    } else {
      Fail(Peek(), "expected 'cell' or 'array'");
    }
    Next();
    const Token& name = ExpectIdent("storage name");
    CheckNewGlobalName(name, prog);
    decl.name = name.text;
    decl.slot = prog.storage.size();
    if (decl.kind == StorageKind::kCell && Accept("=")) {
      bool neg = Accept("-");
      decl.initial_value = ParseIntLiteral(neg);
    }
    Expect(";");
    prog.storage.push_back(std::move(decl));
  }

  int64_t ParseIntLiteral(bool negated) {
    const Token& tok = Next();
    if (tok.kind != Tok::kInt) Fail(tok, "expected integer literal");
    if (negated) {
      if (tok.int_value > uint64_t{1} << 63) Fail(tok, "integer literal out of range");
      return static_cast<int64_t>(0 - tok.int_value);
    }
    bool hex = tok.text.size() > 1 && (tok.text[1] == 'x' || tok.text[1] == 'X');
    if (!hex && tok.int_value > static_cast<uint64_t>(INT64_MAX)) {
      Fail(tok, "integer literal out of range");
    }
    // Hex literals denote raw 64-bit patterns.
    return static_cast<int64_t>(tok.int_value);
  }

  const StorageDecl* FindStorage(std::string_view name) const {
    for (const auto& s : prog_->storage) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  // ---- functions & scopes ----

  std::optional<uint32_t> LookupLocal(std::string_view name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(std::string(name));
      if (found != it->end()) return found->second;
    }
    return std::nullopt;
  }

  uint32_t DeclareLocal(const Token& tok) {
    if (IsReserved(tok.text)) Fail(tok, "'" + tok.text + "' is a reserved word");
    if (scopes_.back().count(tok.text)) {
      Fail(tok, "duplicate declaration of '" + tok.text + "'");
    }
    uint32_t slot = next_slot_++;
    scopes_.back()[tok.text] = slot;
    return slot;
  }

  void ParseFunction(TargetProgram& prog) {
    prog_ = &prog;
    Next();  // fn
    const Token& name_tok = ExpectIdent("function name");
    if (IsReserved(name_tok.text)) Fail(name_tok, "'" + name_tok.text + "' is a reserved word");
    if (prog.FindFunction(name_tok.text)) {
      Fail(name_tok, "duplicate function name '" + name_tok.text + "'");
    }
    FunctionDef fn;
    fn.name = name_tok.text;
    function_index_ = static_cast<uint32_t>(prog.functions.size());
    scopes_.assign(1, {});
    next_slot_ = 0;
    Expect("(");
    if (!PeekPunct(")")) {
      do {
        const Token& p = ExpectIdent("parameter name");
        Param param{p.text, IntWidth{64}};
        if (Accept(":")) {
          const Token& ty = ExpectIdent("parameter type");
          static const std::map<std::string, unsigned> kTypes = {
              {"i8", 8}, {"i16", 16}, {"i32", 32}, {"i64", 64}, {"int", 64}};
          auto it = kTypes.find(ty.text);
          if (it == kTypes.end()) Fail(ty, "unknown parameter type '" + ty.text + "'");
          param.width = IntWidth{it->second};
        }
        DeclareLocal(p);
        fn.params.push_back(std::move(param));
        if (fn.params.size() > kMaxParams) Fail(p, "too many parameters (max 16)");
      } while (Accept(","));
    }
    Expect(")");
    in_entry_prefix_ = true;
    fn.body = ParseBlock(/*top_level=*/true);
    fn.frame_size = next_slot_;
    prog.functions.push_back(std::move(fn));
  }

  Block ParseBlock(bool top_level = false) {
    Expect("{");
    scopes_.emplace_back();
    Block block;
    while (!PeekPunct("}")) {
      if (AtEof()) Fail(Peek(), "unexpected end of input, expected '}'");
      bool is_require = PeekIdent("require");
      if (top_level && !is_require) in_entry_prefix_ = false;
      if (!top_level) in_entry_prefix_ = false;
      ParseStmt(block);
    }
    Next();
    scopes_.pop_back();
    return block;
  }

  void ParseStmt(Block& out) {
    const Token& tok = Peek();
    if (tok.kind != Tok::kIdent) Fail(tok, "expected statement");
    if (tok.text == "let") {
      Next();
      const Token& name = ExpectIdent("variable name");
      Expect("=");
      Expr value = ParseExpr();
      Expect(";");
      uint32_t slot = DeclareLocal(name);
      out.push_back(Stmt{stmt::Let{slot, std::move(value)}});
    } else if (tok.text == "if") {
      ParseIf(out);
    } else if (tok.text == "while") {
      Next();
      const Token& at = Peek();
      Cond cond = PushNot(ParseCond(), false);
      if (cond.kind != Cond::kCmp) {
        Fail(at, "logical connectives are not supported in while conditions");
      }
      SiteId site = NewSite(SiteKind::kLoop, tok);
      Block body = ParseBlock();
      out.push_back(Stmt{stmt::While{std::move(*cond.cmp), std::move(body), site}});
    } else if (tok.text == "require" || tok.text == "assert") {
      bool is_require = tok.text == "require";
      const Token& kw = Next();
      Expect("(");
      Cond cond = PushNot(ParseCond(), false);
      Expect(")");
      Expect(";");
      LowerGuard(cond, is_require, kw, in_entry_prefix_, out);
    } else if (tok.text == "return") {
      Next();
      Expr value{expr::IntLit{0}};
      if (!PeekPunct(";")) value = ParseExpr();
      Expect(";");
      out.push_back(Stmt{stmt::Return{std::move(value)}});
    } else if (tok.text == "storage") {
      Next();
      Expect("[");
      Expr addr = ParseExpr();
      Expect("]");
      const Token& eq = Expect("=");
      Expr value = ParseExpr();
      Expect(";");
      out.push_back(Stmt{stmt::StoreStorage{std::move(addr), std::move(value),
                                            NewSite(SiteKind::kStore, eq)}});
    } else if (IsReserved(tok.text)) {
      Fail(tok, "unexpected '" + tok.text + "'");
    } else {
      ParseAssignment(out);
    }
  }

  void ParseAssignment(Block& out) {
    const Token& name = Next();
    if (PeekPunct("=")) {
      const Token& eq = Next();
      Expr value = ParseExpr();
      Expect(";");
      if (auto slot = LookupLocal(name.text)) {
        out.push_back(Stmt{stmt::AssignLocal{*slot, std::move(value)}});
        return;
      }
      const StorageDecl* decl = FindStorage(name.text);
      if (!decl) Fail(name, "undeclared identifier '" + name.text + "'");
      if (decl->kind != StorageKind::kCell) {
        Fail(name, "cannot assign to array '" + name.text + "'");
      }
      out.push_back(Stmt{stmt::StoreStorage{SlotExpr(decl->slot), std::move(value),
                                            NewSite(SiteKind::kStore, eq)}});
      return;
    }
    const StorageDecl* decl = FindStorage(name.text);
    if (LookupLocal(name.text) || !decl) {
      if (!decl && !LookupLocal(name.text)) {
        Fail(name, "undeclared identifier '" + name.text + "'");
      }
      Fail(name, "expected '=' after '" + name.text + "'");
    }
    if (decl->kind != StorageKind::kArray) {
      Fail(name, "'" + name.text + "' is not an array");
    }
    if (PeekPunct("[")) {
      const Token& open = Next();
      Expr index = ParseExpr();
      Expect("]");
      const Token& eq = Expect("=");
      Expr value = ParseExpr();
      Expect(";");
      Expr addr{expr::ElemAddr{static_cast<uint32_t>(decl->slot), std::move(index),
                               true, NewSite(SiteKind::kChecked, open)}};
      out.push_back(Stmt{stmt::StoreStorage{std::move(addr), std::move(value),
                                            NewSite(SiteKind::kStore, eq)}});
      return;
    }
    Expect(".");
    const Token& member = ExpectIdent("'length' or 'push'");
    if (member.text == "length") {
      const Token& eq = Expect("=");
      Expr value = ParseExpr();
      Expect(";");
      out.push_back(Stmt{stmt::StoreStorage{SlotExpr(decl->slot), std::move(value),
                                            NewSite(SiteKind::kStore, eq)}});
    } else if (member.text == "push") {
      Expect("(");
      Expr value = ParseExpr();
      Expect(")");
      Expect(";");
      // let tmp = value; arr.length = arr.length + 1; arr[length - 1] = tmp;
      uint32_t tmp = next_slot_++;
      out.push_back(Stmt{stmt::Let{tmp, std::move(value)}});
      Expr grown{expr::Binary{BinOp::kAdd, LoadSlot(decl->slot),
                              Expr{expr::IntLit{1}},
                              NewSite(SiteKind::kChecked, member)}};
      out.push_back(Stmt{stmt::StoreStorage{SlotExpr(decl->slot), std::move(grown),
                                            NewSite(SiteKind::kStore, member)}});
      Expr last{expr::Binary{BinOp::kSub, LoadSlot(decl->slot),
                             Expr{expr::IntLit{1}},
                             NewSite(SiteKind::kChecked, member)}};
      Expr addr{expr::ElemAddr{static_cast<uint32_t>(decl->slot), std::move(last),
                               false, 0}};
      out.push_back(Stmt{stmt::StoreStorage{std::move(addr), Expr{expr::Local{tmp}},
                                            NewSite(SiteKind::kStore, member)}});
    } else {
      Fail(member, "unknown array member '" + member.text + "'");
    }
  }

  static Expr SlotExpr(uint64_t slot) {
    return Expr{expr::IntLit{static_cast<int64_t>(slot)}};
  }
  static Expr LoadSlot(uint64_t slot) { return Expr{expr::Load{SlotExpr(slot)}}; }

  void ParseIf(Block& out) {
    const Token& kw = Next();  // if
    Cond cond = PushNot(ParseCond(), false);
    Block then_block = ParseBlock();
    Block else_block;
    if (PeekIdent("else")) {
      Next();
      if (PeekIdent("if")) {
        ParseIf(else_block);
      } else {
        else_block = ParseBlock();
      }
    }
    out.push_back(LowerIf(cond, std::move(then_block), std::move(else_block), kw));
  }

  // if (A && B) T else E  ==>  if A { if B T else E } else E
  // if (A || B) T else E  ==>  if A T else { if B T else E }
  Stmt LowerIf(const Cond& c, Block then_block, Block else_block, const Token& at) {
    switch (c.kind) {
      case Cond::kCmp:
        return Stmt{stmt::If{*c.cmp, std::move(then_block), std::move(else_block),
                             NewSite(SiteKind::kBranch, at)}};
      case Cond::kAnd: {
        Block inner{LowerIfChain(c.children, 1, true, then_block, else_block, at)};
        return LowerIf(c.children[0], std::move(inner), std::move(else_block), at);
      }
      case Cond::kOr: {
        Block inner{LowerIfChain(c.children, 1, false, then_block, else_block, at)};
        return LowerIf(c.children[0], std::move(then_block), std::move(inner), at);
      }
      case Cond::kNot:
        break;
    }
    Fail(at, "internal: unnormalized condition");
  }

  Stmt LowerIfChain(const std::vector<Cond>& parts, size_t from, bool is_and,
                    const Block& then_block, const Block& else_block,
                    const Token& at) {
    if (from + 1 == parts.size()) return LowerIf(parts[from], then_block, else_block, at);
    Block rest{LowerIfChain(parts, from + 1, is_and, then_block, else_block, at)};
    return is_and ? LowerIf(parts[from], std::move(rest), else_block, at)
                  : LowerIf(parts[from], then_block, std::move(rest), at);
  }

  // require(A && B) ==> require(A); require(B)
  // require(A || B) ==> if A {} else { require(B) }
  void LowerGuard(const Cond& c, bool is_require, const Token& at, bool entry,
                  Block& out) {
    switch (c.kind) {
      case Cond::kCmp:
        if (is_require) {
          out.push_back(Stmt{stmt::Require{*c.cmp, NewSite(SiteKind::kRequire, at), entry}});
        } else {
          out.push_back(Stmt{stmt::Assert{*c.cmp, NewSite(SiteKind::kAssert, at)}});
        }
        return;
      case Cond::kAnd:
        for (const auto& part : c.children) LowerGuard(part, is_require, at, entry, out);
        return;
      case Cond::kOr: {
        Block fallback;
        std::vector<Cond> rest(c.children.begin() + 1, c.children.end());
        if (rest.size() == 1) {
          LowerGuard(rest[0], is_require, at, entry, fallback);
        } else {
          LowerGuard(Cond{Cond::kOr, std::nullopt, std::move(rest)}, is_require, at,
                     entry, fallback);
        }
        out.push_back(LowerIf(c.children[0], Block{}, std::move(fallback), at));
        return;
      }
      case Cond::kNot:
        break;
    }
    Fail(at, "internal: unnormalized condition");
  }

  // ---- conditions ----

  Cond ParseCond() {
    Cond lhs = ParseAndCond();
    if (!PeekPunct("||")) return lhs;
    Cond node{Cond::kOr, std::nullopt, {}};
    node.children.push_back(std::move(lhs));
    while (Accept("||")) node.children.push_back(ParseAndCond());
    return node;
  }

  Cond ParseAndCond() {
    Cond lhs = ParseNotCond();
    if (!PeekPunct("&&")) return lhs;
    Cond node{Cond::kAnd, std::nullopt, {}};
    node.children.push_back(std::move(lhs));
    while (Accept("&&")) node.children.push_back(ParseNotCond());
    return node;
  }

  Cond ParseNotCond() {
    if (Accept("!")) {
      Cond node{Cond::kNot, std::nullopt, {}};
      node.children.push_back(ParseNotCond());
      return node;
    }
    if (PeekPunct("(")) {
      // Either a parenthesized condition or a parenthesized arithmetic
      // operand of a comparison; try the former first.
      size_t saved = pos_;
      size_t saved_sites = proto_sites_.size();
      try {
        Next();
        Cond inner = ParseCond();
        Expect(")");
        if (!PeekCmpOp()) return inner;
      } catch (const ParseError&) {
      }
      pos_ = saved;
      proto_sites_.resize(saved_sites);
    }
    return ParseComparison();
  }

  bool PeekCmpOp() const {
    static constexpr std::string_view kOps[] = {"==", "!=", "<", "<=", ">", ">="};
    for (auto op : kOps) {
      if (PeekPunct(op)) return true;
    }
    return false;
  }

  Cond ParseComparison() {
    Expr lhs = ParseExpr();
    const Token& op_tok = Peek();
    if (!PeekCmpOp()) Fail(op_tok, "expected comparison operator");
    Next();
    static const std::map<std::string, CmpOp> kOps = {
        {"==", CmpOp::kEq}, {"!=", CmpOp::kNe}, {"<", CmpOp::kLt},
        {"<=", CmpOp::kLe}, {">", CmpOp::kGt},  {">=", CmpOp::kGe}};
    CmpOp op = kOps.at(op_tok.text);
    Expr rhs = ParseExpr();
    return Cond{Cond::kCmp, CmpExpr{op, std::move(lhs), std::move(rhs)}, {}};
  }

  // ---- expressions ----

  Expr ParseExpr() {
    Expr lhs = ParseTerm();
    while (PeekPunct("+") || PeekPunct("-")) {
      const Token& op = Next();
      Expr rhs = ParseTerm();
      lhs = Expr{expr::Binary{op.text == "+" ? BinOp::kAdd : BinOp::kSub,
                              std::move(lhs), std::move(rhs),
                              NewSite(SiteKind::kChecked, op)}};
    }
    return lhs;
  }

  Expr ParseTerm() {
    Expr lhs = ParseUnary();
    while (PeekPunct("*") || PeekPunct("/") || PeekPunct("%")) {
      const Token& op = Next();
      BinOp bop = op.text == "*" ? BinOp::kMul : op.text == "/" ? BinOp::kDiv : BinOp::kMod;
      Expr rhs = ParseUnary();
      lhs = Expr{expr::Binary{bop, std::move(lhs), std::move(rhs),
                              NewSite(SiteKind::kChecked, op)}};
    }
    return lhs;
  }

  Expr ParseUnary() {
    if (PeekPunct("-")) {
      const Token& op = Next();
      if (Peek().kind == Tok::kInt) return Expr{expr::IntLit{ParseIntLiteral(true)}};
      Expr operand = ParseUnary();
      return Expr{expr::Negate{std::move(operand), NewSite(SiteKind::kChecked, op)}};
    }
    return ParsePrimary();
  }

  Expr ParsePrimary() {
    const Token& tok = Peek();
    if (tok.kind == Tok::kInt) return Expr{expr::IntLit{ParseIntLiteral(false)}};
    if (Accept("(")) {
      Expr inner = ParseExpr();
      Expect(")");
      return inner;
    }
    if (tok.kind != Tok::kIdent) Fail(tok, "expected expression");
    if (tok.text == "hash") {
      Next();
      Expect("(");
      Expr inner = ParseExpr();
      Expect(")");
      return Expr{expr::Hash{std::move(inner)}};
    }
    if (tok.text == "storage") {
      Next();
      Expect("[");
      Expr addr = ParseExpr();
      Expect("]");
      return Expr{expr::Load{std::move(addr)}};
    }
    if (IsReserved(tok.text)) Fail(tok, "unexpected '" + tok.text + "'");
    Next();
    if (auto slot = LookupLocal(tok.text)) return Expr{expr::Local{*slot}};
    const StorageDecl* decl = FindStorage(tok.text);
    if (!decl) Fail(tok, "undeclared identifier '" + tok.text + "'");
    if (decl->kind == StorageKind::kCell) return LoadSlot(decl->slot);
    if (PeekPunct("[")) {
      const Token& open = Next();
      Expr index = ParseExpr();
      Expect("]");
      return Expr{expr::Load{Expr{expr::ElemAddr{static_cast<uint32_t>(decl->slot),
                                                 std::move(index), true,
                                                 NewSite(SiteKind::kChecked, open)}}}};
    }
    Expect(".");
    const Token& member = ExpectIdent("'length'");
    if (member.text != "length") Fail(member, "unknown array member '" + member.text + "'");
    return LoadSlot(decl->slot);
  }

  // ---- final site numbering ----

  class SiteNumberer {
   public:
    SiteNumberer(const std::vector<ProtoSite>& protos, TargetProgram& prog)
        : protos_(protos), prog_(prog) {}

    void Run() {
      for (uint32_t f = 0; f < prog_.functions.size(); ++f) {
        function_ = f;
        Visit(prog_.functions[f].body);
      }
    }

   private:
    SiteId Renumber(SiteId proto) {
      const ProtoSite& p = protos_[proto];
      prog_.sites.push_back(SiteInfo{p.kind, function_, p.line, p.column});
      return static_cast<SiteId>(prog_.sites.size() - 1);
    }

    void Visit(Expr& e) {
      std::visit(
          [this](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, expr::Load>) {
              Visit(*n.addr);
            } else if constexpr (std::is_same_v<T, expr::ElemAddr>) {
              if (n.checked) n.site = Renumber(n.site);
              Visit(*n.index);
            } else if constexpr (std::is_same_v<T, expr::Binary>) {
              Visit(*n.lhs);
              Visit(*n.rhs);
              n.site = Renumber(n.site);
            } else if constexpr (std::is_same_v<T, expr::Negate>) {
              Visit(*n.operand);
              n.site = Renumber(n.site);
            } else if constexpr (std::is_same_v<T, expr::Hash>) {
              Visit(*n.operand);
            }
          },
          e.node);
    }

    void Visit(CmpExpr& c) {
      Visit(c.lhs);
      Visit(c.rhs);
    }

    void Visit(Block& block) {
      for (Stmt& s : block) {
        std::visit(
            [this](auto& n) {
              using T = std::decay_t<decltype(n)>;
              if constexpr (std::is_same_v<T, stmt::Let> ||
                            std::is_same_v<T, stmt::AssignLocal> ||
                            std::is_same_v<T, stmt::Return>) {
                Visit(n.value);
              } else if constexpr (std::is_same_v<T, stmt::StoreStorage>) {
                Visit(n.addr);
                Visit(n.value);
                n.site = Renumber(n.site);
              } else if constexpr (std::is_same_v<T, stmt::If>) {
                Visit(n.cond);
                n.site = Renumber(n.site);
                Visit(n.then_block);
                Visit(n.else_block);
              } else if constexpr (std::is_same_v<T, stmt::While>) {
                Visit(n.cond);
                n.site = Renumber(n.site);
                Visit(n.body);
              } else {
                Visit(n.cond);
                n.site = Renumber(n.site);
              }
            },
            s.node);
      }
    }

    const std::vector<ProtoSite>& protos_;
    TargetProgram& prog_;
    uint32_t function_ = 0;
  };

  void AssignSites(TargetProgram& prog) { SiteNumberer(proto_sites_, prog).Run(); }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  TargetProgram* prog_ = nullptr;
  std::vector<ProtoSite> proto_sites_;
  std::vector<std::unordered_map<std::string, uint32_t>> scopes_;
  uint32_t next_slot_ = 0;
  uint32_t function_index_ = 0;
  bool in_entry_prefix_ = false;
};

}  // namespace

TargetProgram ParseProgram(std::string_view source, std::string name,
                           std::string source_path) {
  return Parser(source).Parse(std::move(name), std::move(source_path));
}

TargetProgram ParseProgramFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string stem = std::filesystem::path(path).stem().string();
  return ParseProgram(buf.str(), stem, path);
}

}  // namespace lfuzz
