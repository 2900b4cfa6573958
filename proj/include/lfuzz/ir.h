// Target IR: a minimal contract-style language whose programs are the fuzz
// targets. Programs are produced by ParseProgram (parser.h) and executed by
// Execute (interpreter.h).
//
// Every branching statement, guard, storage write and checked operation
// carries a SiteId. Site ids are dense, start at 0 and follow lexical order
// after logical connectives have been desugared into nested conditionals.
#ifndef LFUZZ_IR_H_
#define LFUZZ_IR_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lfuzz {

using SiteId = uint32_t;

inline constexpr size_t kMaxParams = 16;

// Deep-copying owning pointer, so AST nodes keep value semantics.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

// Signed two's-complement integer width, in bits (8..64).
struct IntWidth {
  unsigned bits = 64;

  int64_t min() const {
    return bits >= 64 ? INT64_MIN : -(int64_t{1} << (bits - 1));
  }
  int64_t max() const {
    return bits >= 64 ? INT64_MAX : (int64_t{1} << (bits - 1)) - 1;
  }
  bool contains(__int128 v) const { return v >= min() && v <= max(); }
  // Reduces v modulo 2^bits into [min, max].
  int64_t wrap(__int128 v) const;
  friend bool operator==(IntWidth, IntWidth) = default;
};

enum class CmpOp : uint8_t { kEq, kNe, kLt, kLe, kGt, kGe };
std::string_view CmpOpName(CmpOp op);
bool EvalCmp(CmpOp op, int64_t l, int64_t r);
// The operator whose truth value is always the opposite of op.
CmpOp NegateCmp(CmpOp op);

enum class BinOp : uint8_t { kAdd, kSub, kMul, kDiv, kMod };

struct Expr;

namespace expr {
struct IntLit {
  int64_t value;
};
struct Local {
  uint32_t slot;
};
// Reads persistent storage at the (unsigned) address the operand evaluates to.
struct Load {
  Box<Expr> addr;
};
// Address of element `index` of a storage array: base(array) + index.
// When `checked`, traps with kOutOfBounds unless index < length (unsigned).
struct ElemAddr {
  uint32_t array_slot;
  Box<Expr> index;
  bool checked;
  SiteId site;
};
struct Binary {
  BinOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
  SiteId site;
};
struct Negate {
  Box<Expr> operand;
  SiteId site;
};
// Built-in scrambling hash; stands in for keccak-style hashing.
struct Hash {
  Box<Expr> operand;
};
}  // namespace expr

struct Expr {
  std::variant<expr::IntLit, expr::Local, expr::Load, expr::ElemAddr,
               expr::Binary, expr::Negate, expr::Hash>
      node;
};

// A single comparison; logical connectives never survive parsing.
struct CmpExpr {
  CmpOp op;
  Expr lhs;
  Expr rhs;
};

struct Stmt;
using Block = std::vector<Stmt>;

namespace stmt {
struct Let {
  uint32_t slot;
  Expr value;
};
struct AssignLocal {
  uint32_t slot;
  Expr value;
};
struct StoreStorage {
  Expr addr;
  Expr value;
  SiteId site;
};
struct If {
  CmpExpr cond;
  Block then_block;
  Block else_block;
  SiteId site;
};
struct While {
  CmpExpr cond;
  Block body;
  SiteId site;
};
struct Require {
  CmpExpr cond;
  SiteId site;
  // Part of the leading run of requires at the top of a function body.
  bool at_entry;
};
struct Assert {
  CmpExpr cond;
  SiteId site;
};
struct Return {
  Expr value;
};
}  // namespace stmt

struct Stmt {
  std::variant<stmt::Let, stmt::AssignLocal, stmt::StoreStorage, stmt::If,
               stmt::While, stmt::Require, stmt::Assert, stmt::Return>
      node;
};

struct Param {
  std::string name;
  IntWidth width;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  Block body;
  // Number of local slots (params occupy slots [0, params.size())).
  uint32_t frame_size = 0;
};

enum class StorageKind : uint8_t { kCell, kArray };

struct StorageDecl {
  std::string name;
  StorageKind kind;
  // Static address: the cell itself, or the array's length cell.
  uint64_t slot;
  int64_t initial_value = 0;
};

enum class SiteKind : uint8_t { kBranch, kLoop, kRequire, kAssert, kStore,
                                kChecked };
std::string_view SiteKindName(SiteKind kind);

struct SiteInfo {
  SiteKind kind;
  uint32_t function;
  int line;
  int column;
};

struct TargetProgram {
  std::string name;
  std::string source_path;
  std::vector<FunctionDef> functions;
  std::vector<StorageDecl> storage;
  std::vector<SiteInfo> sites;

  std::optional<uint32_t> FindFunction(std::string_view fn_name) const;
  size_t CountSites(SiteKind kind) const;
  // Sites that produce a (ToFalse, ToTrue) cost pair.
  bool IsConditionSite(SiteId site) const;
};

// First element address of the array whose length cell lives at `slot`.
// Mirrors the EVM layout where elements start at a hash of the slot.
uint64_t ArrayBase(uint64_t slot);

// 64-bit scrambling function backing the `hash(...)` builtin.
uint64_t Scramble(uint64_t x);

}  // namespace lfuzz

#endif  // LFUZZ_IR_H_
